use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::operators::{Boundary, Hamiltonian, Projector, Spin};
use crate::qcore::{fq_inf, AnisotropyParams};
use crate::scalar::qpow;
use crate::sector::Interval;
use crate::spectral::DropletFamily;
use crate::states::{
    build_droplet, build_kink, coproduct_check, droplet_overlap_closed, droplet_residual, g_expectation_closed,
    g_expectation_direct, kink_norm_sq_closed, mixed_overlap_closed, pair_overlap_closed, pair_overlap_direct,
    pair_overlap_normalized_closed, projform_direct, projform_expectation, projform_exponent,
    ring_translation_overlap_closed, ring_translation_overlap_direct, split_projection_distance,
    two_site_table_closed, two_site_table_direct, DropletSpec, KinkKind, KinkSpec,
};

use super::{CheckReport, ReportBuilder};

const REL_TOL: f64 = 1e-11;
/// Chains up to this length also run the projector-based direct routines
/// next to the configuration histograms.
const CROSS_CHECK_L: usize = 5;
/// Longest chain for the brute-force marble transport search.
const MARBLE_L: usize = 8;

/// Exhaustive ranges of the closed-form comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosedFormLimits {
    pub max_l: usize,
    pub qs: Vec<f64>,
}

impl Default for ClosedFormLimits {
    fn default() -> Self {
        Self { max_l: 10, qs: vec![0.25, 0.5] }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Largest relative error and number of comparisons per identity family.
#[derive(Default)]
struct Tally {
    worst: f64,
    count: usize,
}

impl Tally {
    fn add(&mut self, closed: f64, direct: f64) {
        self.worst = self.worst.max(rel(closed, direct));
        self.count += 1;
    }

    fn add_err(&mut self, err: f64) {
        self.worst = self.worst.max(err);
        self.count += 1;
    }
}

/// Every increasing cut list 0 = c₀ < c₁ < … < c_r = len.
fn cut_lists(len: usize) -> Vec<Vec<i64>> {
    let inner = len.saturating_sub(1);
    (0u64..1 << inner)
        .map(|bits| {
            let mut cuts = vec![0i64];
            cuts.extend((1..len as i64).filter(|&c| bits >> (c - 1) & 1 == 1));
            cuts.push(len as i64);
            cuts
        })
        .collect()
}

/// Every count vector with 0 ≤ n_j ≤ part size.
fn count_vectors(cuts: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for w in cuts.windows(2) {
        let size = w[1] - w[0];
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..=size).map(move |c| {
                    let mut v = v.clone();
                    v.push(c);
                    v
                })
            })
            .collect();
    }
    out
}

fn part_counts(mask: u64, cuts: &[i64]) -> Vec<i64> {
    cuts.windows(2)
        .map(|w| {
            let width = (w[1] - w[0]) as u32;
            let bits = (mask >> w[0]) & ((1u64 << width) - 1);
            bits.count_ones() as i64
        })
        .collect()
}

/// Brute-force transport cost behind the projector exponent: the least
/// Σ_x |f(x) − x| over site permutations f carrying some configuration
/// with the prescribed counts to the packed ground configuration (down
/// spins at the right end for a kink, at the left end for an antikink).
pub fn marble_transport_cost(kind: KinkKind, cuts: &[i64], counts: &[i64]) -> Result<i64> {
    if cuts.len() != counts.len() + 1 || cuts.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::MalformedPartition(format!("cuts {cuts:?} with counts {counts:?}")));
    }
    let (x0, xr) = (cuts[0], cuts[cuts.len() - 1]);
    let len = (xr - x0) as usize;
    if len > 20 {
        return Err(Error::Range(format!("brute-force transport limited to 20 sites, got {len}")));
    }
    let rel_cuts: Vec<i64> = cuts.iter().map(|c| c - x0).collect();
    let n: i64 = counts.iter().sum();
    let target: Vec<i64> = match kind {
        KinkKind::Kink => (len as i64 - n..len as i64).collect(),
        KinkKind::Antikink => (0..n).collect(),
    };
    let mut best: Option<i64> = None;
    for mask in 0u64..1 << len {
        if mask.count_ones() as i64 != n || part_counts(mask, &rel_cuts) != counts {
            continue;
        }
        let src: Vec<i64> = (0..len as i64).filter(|&i| mask >> i & 1 == 1).collect();
        // The optimal permutation matches down spins in order and moves each
        // up spin opposite, so every unit of marble travel is paid twice.
        let cost = 2 * src.iter().zip(&target).map(|(s, t)| (s - t).abs()).sum::<i64>();
        best = Some(best.map_or(cost, |b| b.min(cost)));
    }
    best.ok_or_else(|| Error::Range(format!("counts {counts:?} do not fit cuts {cuts:?}")))
}

struct ClosedFormSweep {
    q: f64,
    max_l: usize,
    coproduct: Tally,
    norm: Tally,
    mixed: Tally,
    pair: Tally,
    pair_normalized: Tally,
    droplet: Tally,
    projform: Tally,
    g_bullets: Tally,
    ring: Tally,
    two_site: Tally,
    marble_mismatches: usize,
    marble_count: usize,
}

impl ClosedFormSweep {
    fn new(q: f64, max_l: usize) -> Self {
        Self {
            q,
            max_l,
            coproduct: Tally::default(),
            norm: Tally::default(),
            mixed: Tally::default(),
            pair: Tally::default(),
            pair_normalized: Tally::default(),
            droplet: Tally::default(),
            projform: Tally::default(),
            g_bullets: Tally::default(),
            ring: Tally::default(),
            two_site: Tally::default(),
            marble_mismatches: 0,
            marble_count: 0,
        }
    }

    fn kinks(&mut self) -> Result<()> {
        let q = self.q;
        for len in 1..=self.max_l {
            let iv = Interval::chain(len)?;
            for n in 0..=len {
                let k = build_kink(&KinkSpec::kink(iv, n)?, q)?;
                let ak = build_kink(&KinkSpec::antikink(iv, n)?, q)?;
                let closed_norm = kink_norm_sq_closed(len, n, q)?;
                self.norm.add(closed_norm, k.norm_sq());
                self.norm.add(closed_norm, ak.norm_sq());
                self.mixed.add(mixed_overlap_closed(len, n, n, q)?, k.dot(&ak)?);
                if n < len {
                    self.mixed.add(mixed_overlap_closed(len, n, n + 1, q)?, 0.0);
                }
                for (spec, state) in [(KinkSpec::kink(iv, n)?, &k), (KinkSpec::antikink(iv, n)?, &ak)] {
                    let scale = state.amplitudes.iter().fold(0.0f64, |m, a| m.max(a.abs()));
                    for cut in 1..len as i64 {
                        self.coproduct.add_err(coproduct_check(&spec, cut, q)? / scale);
                    }
                }
            }
        }
        Ok(())
    }

    fn pairs(&mut self) -> Result<()> {
        let q = self.q;
        let max = self.max_l as i64;
        for x in 0..=max {
            for y in 0..=max - x {
                for r in 0..=max - x - y {
                    if x + y + r == 0 {
                        continue;
                    }
                    for k in 0..=r {
                        for m in 0..=x {
                            for n in 0..=y {
                                let (raw, norms) = pair_overlap_direct(x, y, r, k, m, n, q)?;
                                self.pair.add(pair_overlap_closed(x, y, r, k, m, n, q)?, raw);
                                self.pair_normalized
                                    .add(pair_overlap_normalized_closed(x, y, r, k, m, n, q)?, raw / norms);
                            }
                        }
                    }
                }
            }
        }
        for l in 1..=self.max_l {
            for n in 0..=l {
                let fam = DropletFamily::droplets(l, n, q)?;
                let labels = fam.labels();
                for i in 0..fam.len() {
                    for j in 0..fam.len() {
                        let closed = droplet_overlap_closed(l, n, labels[i], labels[j], q)?;
                        self.droplet.add(closed, fam.gram()[(i, j)]);
                    }
                }
            }
        }
        Ok(())
    }

    fn projforms(&mut self) -> Result<()> {
        let q = self.q;
        for len in 1..=self.max_l {
            let iv = Interval::chain(len)?;
            for kind in [KinkKind::Kink, KinkKind::Antikink] {
                let states = (0..=len)
                    .map(|n| build_kink(&KinkSpec::new(iv, n, kind)?, q))
                    .collect::<Result<Vec<_>>>()?;
                for cuts in cut_lists(len) {
                    let mut hist: HashMap<Vec<i64>, f64> = HashMap::new();
                    for s in &states {
                        let norm = s.norm_sq();
                        for (&mask, &amp) in s.basis.masks().iter().zip(&s.amplitudes) {
                            *hist.entry(part_counts(mask, &cuts)).or_insert(0.0) += amp * amp / norm;
                        }
                    }
                    for counts in count_vectors(&cuts) {
                        let direct = hist.get(&counts).copied().unwrap_or(0.0);
                        let closed = projform_expectation(kind, &cuts, &counts, q)?;
                        self.projform.add(closed, direct);
                        if len <= CROSS_CHECK_L {
                            self.projform.add(closed, projform_direct(kind, &cuts, &counts, q)?);
                        }
                        if len <= MARBLE_L {
                            self.marble_count += 1;
                            if projform_exponent(kind, &cuts, &counts)? != marble_transport_cost(kind, &cuts, &counts)? {
                                self.marble_mismatches += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn g_bullets(&mut self) -> Result<()> {
        let q = self.q;
        for l in 1..=self.max_l {
            for n in 0..=l {
                for spec in DropletSpec::all(l, n)? {
                    let xi = build_droplet(&spec, q)?;
                    let norm = xi.norm_sq();
                    for a in 1..=l as i64 {
                        for b in a..=l as i64 {
                            let jl = (b - a + 1) as u32;
                            let inner_mask = ((1u64 << jl) - 1) << (a - 1);
                            let left_mask = (1u64 << (a - 1)) - 1;
                            let mut up = vec![0.0; n + 1];
                            let mut down = vec![0.0; n + 1];
                            for (&mask, &amp) in xi.basis.masks().iter().zip(&xi.amplitudes) {
                                let j = (mask & left_mask).count_ones() as usize;
                                let inner = mask & inner_mask;
                                if inner == 0 {
                                    up[j] += amp * amp / norm;
                                } else if inner == inner_mask {
                                    down[j] += amp * amp / norm;
                                }
                            }
                            let jv = Interval::new(a, b)?;
                            for j in 0..=n {
                                for (sigma, direct) in [(Spin::Up, up[j]), (Spin::Down, down[j])] {
                                    let inner = if sigma == Spin::Up { 0 } else { jl as usize };
                                    if j + inner > n {
                                        continue;
                                    }
                                    let closed = g_expectation_closed(l, n, jv, spec.x, sigma, j as i64, q)?;
                                    self.g_bullets.add(closed, direct);
                                    if l <= CROSS_CHECK_L {
                                        let d = g_expectation_direct(l, n, jv, spec.x, sigma, j as i64, q)?;
                                        self.g_bullets.add(closed, d);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn ring_and_tables(&mut self) -> Result<()> {
        let q = self.q;
        for l in 2..=self.max_l {
            for n in 0..=l {
                for x in 0..=l / 2 {
                    self.ring.add(
                        ring_translation_overlap_closed(l, n, x, q)?,
                        ring_translation_overlap_direct(l, n, x, q)?,
                    );
                }
            }
        }
        let p = AnisotropyParams::from_q(q)?;
        for (c, d) in two_site_table_closed(&p).iter().zip(&two_site_table_direct(&p)?) {
            self.two_site.add(c.value, d.value);
            self.two_site.add(c.overlap, d.overlap);
        }
        Ok(())
    }

    fn report_into(&self, b: &mut ReportBuilder) {
        let tag = format!("q{}", self.q);
        for (name, t) in [
            ("coproduct", &self.coproduct),
            ("kink_norm", &self.norm),
            ("mixed_overlap", &self.mixed),
            ("pair_overlap", &self.pair),
            ("pair_overlap_normalized", &self.pair_normalized),
            ("droplet_overlap", &self.droplet),
            ("projector_expectation", &self.projform),
            ("g_expectation", &self.g_bullets),
            ("ring_translation_overlap", &self.ring),
            ("two_site_table", &self.two_site),
        ] {
            b.upper(&format!("{name}_{tag}"), t.worst, REL_TOL);
            b.record(&format!("{name}_{tag}_cases"), t.count as f64);
        }
        b.upper(&format!("marble_mismatches_{tag}"), self.marble_mismatches as f64, 0.0);
        b.record(&format!("marble_{tag}_cases"), self.marble_count as f64);
    }
}

/// Exhaustive comparison of every closed form for kinks, droplets,
/// projector expectations and ring overlaps against direct evaluation.
pub fn check_appendix_closed_forms(limits: &ClosedFormLimits) -> Result<CheckReport> {
    if limits.max_l > 12 {
        return Err(Error::Range(format!("closed-form sweep is limited to L <= 12, got {}", limits.max_l)));
    }
    let mut b = ReportBuilder::new("appendix_closed_forms")
        .param("max_L", limits.max_l)
        .param("q", limits.qs.clone());
    for &q in &limits.qs {
        AnisotropyParams::from_q(q)?;
        let mut s = ClosedFormSweep::new(q, limits.max_l);
        s.kinks()?;
        s.pairs()?;
        s.projforms()?;
        s.g_bullets()?;
        s.ring_and_tables()?;
        s.report_into(&mut b);
    }
    Ok(b.finish())
}

/// Overlap decay between droplets (bare, through H⁺⁺ and through (H⁺⁺)²),
/// the per-droplet residual, the edge-spin weights and the split-state
/// distance bound, for every L up to `max_l`.
pub fn check_droplet_estimates(max_l: usize, q: f64) -> Result<CheckReport> {
    let p = AnisotropyParams::from_q(q)?;
    let finf = fq_inf(q);
    let (mut ov, mut hov, mut h2ov, mut resid, mut edge_l, mut edge_r, mut split) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for l in 2..=max_l {
        let h = Hamiltonian::chain(l, Boundary::DROPLET, p)?;
        for n in 0..=l {
            let fam = DropletFamily::droplets(l, n, q)?;
            let hf = fam.members().iter().map(|f| h.apply(f)).collect::<Result<Vec<_>>>()?;
            let h2f = hf.iter().map(|f| h.apply(f)).collect::<Result<Vec<_>>>()?;
            let labels = fam.labels();
            for (i, fi) in fam.members().iter().enumerate() {
                for j in 0..fam.len() {
                    let d = (labels[i] as i64 - labels[j] as i64).abs();
                    let bound = qpow(q, n as i64 * d) / finf;
                    ov = ov.max(fam.gram()[(i, j)].abs() / bound);
                    if d >= 1 {
                        hov = hov.max(fi.dot(&hf[j])?.abs() / bound);
                    }
                    if d >= 2 {
                        h2ov = h2ov.max(fi.dot(&h2f[j])?.abs() / bound);
                    }
                }
            }
            for spec in DropletSpec::all(l, n)? {
                let r = droplet_residual(&spec, &p)?;
                if let Some(bound) = r.bound {
                    resid = resid.max(r.residual_sq / bound);
                }
                let xi = build_droplet(&spec, q)?;
                let norm = xi.norm_sq();
                let (fl, ce) = ((n / 2) as i64, (n - n / 2) as i64);
                let x = spec.x as i64;
                if fl > 0 && x >= 1 {
                    let t = qpow(q, 2 * fl);
                    let w = Projector::p_up(Interval::new(x, x)?).apply(&xi)?.norm_sq() / norm;
                    edge_l = edge_l.max(w / (t / (1.0 - t)));
                }
                if ce > 0 && x < l as i64 {
                    let t = qpow(q, 2 * ce);
                    let w = Projector::p_up(Interval::new(x + 1, x + 1)?).apply(&xi)?.norm_sq() / norm;
                    edge_r = edge_r.max(w / (t / (1.0 - t)));
                }
            }
            for x in 0..=l {
                for n1 in 0..=x.min(n) {
                    let n2 = n - n1;
                    if n2 + x > l {
                        continue;
                    }
                    match split_projection_distance(l, x, n1, n2, q) {
                        Ok((dist, bound)) => split = split.max(dist / bound),
                        Err(Error::Range(_)) => {}
                        Err(e) => return Err(e),
                    }
                }
            }
        }
    }
    let mut b = ReportBuilder::new("droplet_estimates").param("max_L", max_l).param("q", q);
    b.upper("overlap_ratio", ov, 1.0)
        .upper("h_overlap_ratio", hov, 1.0)
        .upper("h2_overlap_ratio", h2ov, 1.0)
        .upper("residual_ratio", resid, 1.0)
        .upper("left_edge_ratio", edge_l, 1.0)
        .upper("right_edge_ratio", edge_r, 1.0)
        .upper("split_distance_ratio", split, 1.0);
    Ok(b.finish())
}
