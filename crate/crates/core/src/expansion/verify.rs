use serde::{Deserialize, Serialize};

use super::evaluate::{Bindings, Evaluator};
use super::expand::{expand, Bucket, BucketValues};
use super::term::Leaf;
use super::DecompositionResult;
use crate::duhamel::{heat_trajectory, QuadratureConfig};
use crate::spaces::{besov_norm, kato_norm, weak_l3, BesovIndex};
use crate::spectral::{SpectralField, Trajectory};
use crate::Result;

/// Bindings for the perturbation equation `v = e^{tΔ}v0 + B(v,v) + 2B(U_f,v)`:
/// `vl` the heat flow of `v0`, `v`, `w = 2U_f` and `wbar = 0`.
pub fn perturbation_bindings(
    v0: &SpectralField,
    v: &Trajectory,
    uf: &Trajectory,
) -> Result<Bindings> {
    let zero = Trajectory::zeros(*v.grid(), v.times().to_vec())?;
    Bindings::new()
        .bind(Leaf::VL, heat_trajectory(v0, v.times())?)?
        .bind(Leaf::V, v.clone())?
        .bind(Leaf::W, uf.scaled(2.0))?
        .bind(Leaf::WBAR, zero)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermNorm {
    pub bucket: Bucket,
    pub term: String,
    pub sup_l2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    /// Number of terms in H, W and Z.
    pub counts: [usize; 3],
    /// `sup_t ‖v - (H + W + Z)‖_{L^2} / sup_t ‖v‖_{L^2}`.
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    pub v_sup_l2: f64,
    pub h_sup_l2: f64,
    pub w_sup_l2: f64,
    pub z_sup_l2: f64,
    /// `sup_t ‖H(t)‖_{Ḃ^{s_p}_{p,p}}`.
    pub h_besov_sup: f64,
    pub h_kato: f64,
    /// `sup_t ‖(W + Z)(t)‖_{L^{3,∞}}`.
    pub wz_weak_l3_sup: f64,
    pub b_calls: usize,
    /// Per-term norms, filled only when the check fails.
    pub term_norms: Vec<TermNorm>,
}

/// Expands to level `n`, evaluates the buckets with `v` bound to the `v`
/// leaf and compares their sum with `v`.
pub fn verify_decomposition(
    v: &Trajectory,
    bindings: &Bindings,
    n: usize,
    q: &QuadratureConfig,
    tol: f64,
    p: f64,
) -> Result<(DecompositionResult, DecompositionReport)> {
    let mut dec = expand(n)?;
    let bindings = bindings.clone().bind(Leaf::V, v.clone())?;
    let mut ev = Evaluator::new(&dec.store, &bindings, *q);
    let h = ev.sum(&dec.h_terms)?;
    let w = ev.sum(&dec.w_terms)?;
    let z = ev.sum(&dec.z_terms)?;
    let total = h.add(&w)?.add(&z)?;
    let v_sup = v.sup_l2();
    let diff = v.sub(&total)?.sup_l2();
    let residual = if v_sup > 0.0 { diff / v_sup } else { diff };
    let passed = residual <= tol;
    let mut term_norms = vec![];
    if !passed {
        for b in [Bucket::H, Bucket::W, Bucket::Z] {
            for (id, c) in dec.bucket(b).to_vec() {
                let sup_l2 = ev
                    .eval(id)?
                    .map_or(0.0, |t| t.sup_l2() * c.unsigned_abs() as f64);
                term_norms.push(TermNorm {
                    bucket: b,
                    term: format!("{} {}", c, dec.store.sexpr(id)),
                    sup_l2,
                });
            }
        }
    }
    let b_calls = ev.b_calls;
    let idx = BesovIndex::critical(p)?;
    let wz = w.add(&z)?;
    let report = DecompositionReport {
        n,
        counts: dec.counts(),
        residual,
        tol,
        passed,
        v_sup_l2: v_sup,
        h_sup_l2: h.sup_l2(),
        w_sup_l2: w.sup_l2(),
        z_sup_l2: z.sup_l2(),
        h_besov_sup: h
            .states()
            .iter()
            .map(|s| besov_norm(s, &idx))
            .fold(0.0, f64::max),
        h_kato: kato_norm(&h, p)?,
        wz_weak_l3_sup: wz.states().iter().map(weak_l3).fold(0.0, f64::max),
        b_calls,
        term_norms,
    };
    dec.evaluated = Some(BucketValues { h, w, z });
    Ok((dec, report))
}
