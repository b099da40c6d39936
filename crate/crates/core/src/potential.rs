//! Complex Hessians of real potentials and their exterior calculus.
//!
//! The quantity i ddbar(f) is read out of the real Hessian of f through
//! fixed quarter-weight combinations, so the associated real 2-form has
//! coefficients that are half-weight sums of Hessian entries. Applying
//! the exterior derivative to that 2-form produces a linear functional
//! on third-derivative tensors whose weights cancel identically: d of
//! i ddbar(f) is zero as a calculus identity, and because every weight
//! is a dyadic rational the cancellation is exact in floating point.
//! [`DdbarLayout`] builds those weight tables once per dimension and
//! prunes exact zeros, so the derived 3-form is computed honestly from
//! whatever weights survive.

use crate::forms::{combinations, combo_rank, Herm1, RealPForm, TwoFormJet};
use crate::jets::{Jet2, Jet3};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::collections::HashMap;

/// The complex Hessian M_ab = d2 f / dz_a dzbar_b from a real Hessian
/// in interleaved coordinates. Exactly Hermitian for symmetric input.
pub fn ddbar_from_hess(hess: &DMatrix<f64>) -> DMatrix<Complex64> {
    let n = hess.nrows() / 2;
    DMatrix::from_fn(n, n, |a, b| {
        let re = 0.25 * (hess[(2 * a, 2 * b)] + hess[(2 * a + 1, 2 * b + 1)]);
        let im = 0.25 * (hess[(2 * a, 2 * b + 1)] - hess[(2 * a + 1, 2 * b)]);
        Complex64::new(re, im)
    })
}

/// The complex Hessian of a second-order jet.
pub fn ddbar_value(jet: &Jet2) -> DMatrix<Complex64> {
    ddbar_from_hess(&jet.h)
}

/// Complex Hessian with entry gradients from a third-order jet: the
/// r-th partial of M_ab applies the same quarter weights to the third
/// tensor slice T(r, ., .).
pub fn ddbar_herm1(jet: &Jet3) -> Herm1 {
    let dim = jet.g.len();
    let n = dim / 2;
    let value = ddbar_from_hess(&jet.h);
    let grad = (0..dim)
        .map(|r| {
            DMatrix::from_fn(n, n, |a, b| {
                let re = 0.25
                    * (jet.third(r, 2 * a, 2 * b) + jet.third(r, 2 * a + 1, 2 * b + 1));
                let im = 0.25
                    * (jet.third(r, 2 * a, 2 * b + 1) - jet.third(r, 2 * a + 1, 2 * b));
                Complex64::new(re, im)
            })
        })
        .collect();
    Herm1 { value, grad }
}

/// One signed half-weight on a symmetric-array entry.
type Weight = (usize, usize, f64);

/// Precomputed weight tables for reading the real 2-form of i ddbar(f)
/// out of a Hessian, and its exterior derivative out of a third tensor.
pub struct DdbarLayout {
    pub n: usize,
    pub dim: usize,
    /// Per sorted-pair rank: half weights on Hessian entries.
    pub pair_weights: Vec<Vec<Weight>>,
    /// Per sorted-triple rank: weights on sorted third-tensor triples,
    /// after exact-zero pruning. Empty tables encode the identity
    /// d(i ddbar f) = 0.
    pub d_weights: Vec<Vec<(usize, usize, usize, f64)>>,
}

fn sorted3(mut t: [usize; 3]) -> (usize, usize, usize) {
    t.sort_unstable();
    (t[0], t[1], t[2])
}

impl DdbarLayout {
    pub fn new(n: usize) -> Self {
        let dim = 2 * n;
        let npairs = combinations(dim, 2).len();
        let mut pair_weights: Vec<Vec<Weight>> = vec![Vec::new(); npairs];
        let mut push = |i: usize, j: usize, row: usize, col: usize, w: f64| {
            let (idx, sign) = if i < j { ([i, j], 1.0) } else { ([j, i], -1.0) };
            pair_weights[combo_rank(dim, &idx)].push((row, col, sign * w));
        };
        for a in 0..n {
            for b in 0..n {
                // 2 Re M_ab on dx_a dy_b.
                push(2 * a, 2 * b + 1, 2 * a, 2 * b, 0.5);
                push(2 * a, 2 * b + 1, 2 * a + 1, 2 * b + 1, 0.5);
                if a < b {
                    // -2 Im M_ab on dx_a dx_b and on dy_a dy_b.
                    push(2 * a, 2 * b, 2 * a, 2 * b + 1, -0.5);
                    push(2 * a, 2 * b, 2 * a + 1, 2 * b, 0.5);
                    push(2 * a + 1, 2 * b + 1, 2 * a, 2 * b + 1, -0.5);
                    push(2 * a + 1, 2 * b + 1, 2 * a + 1, 2 * b, 0.5);
                }
            }
        }

        // Exterior derivative: coefficient of dx_i dx_j dx_k is
        // d_i w_jk - d_j w_ik + d_k w_ij, each partial replacing a
        // Hessian entry (p, q) by the tensor entry (r, p, q). The
        // tensor is symmetric, so weights accumulate on sorted triples
        // where the calculus identity forces exact dyadic cancellation.
        let triples = combinations(dim, 3);
        let mut d_weights = Vec::with_capacity(triples.len());
        for combo in &triples {
            let (i, j, k) = (combo[0], combo[1], combo[2]);
            let mut acc: HashMap<(usize, usize, usize), f64> = HashMap::new();
            let add = |r: usize, pair: &[Weight], sign: f64, acc: &mut HashMap<(usize, usize, usize), f64>| {
                for &(p, q, w) in pair {
                    *acc.entry(sorted3([r, p, q])).or_insert(0.0) += sign * w;
                }
            };
            add(i, &pair_weights[combo_rank(dim, &[j, k])], 1.0, &mut acc);
            add(j, &pair_weights[combo_rank(dim, &[i, k])], -1.0, &mut acc);
            add(k, &pair_weights[combo_rank(dim, &[i, j])], 1.0, &mut acc);
            let mut surviving: Vec<(usize, usize, usize, f64)> = acc
                .into_iter()
                .filter(|&(_, w)| w != 0.0)
                .map(|((p, q, r), w)| (p, q, r, w))
                .collect();
            surviving.sort_unstable_by_key(|&(p, q, r, _)| (p, q, r));
            d_weights.push(surviving);
        }

        DdbarLayout {
            n,
            dim,
            pair_weights,
            d_weights,
        }
    }

    /// Real 2-form of i ddbar(f) directly from the Hessian.
    pub fn two_form_from_hess(&self, hess: &DMatrix<f64>) -> RealPForm {
        let mut out = RealPForm::zero(self.dim, 2);
        for (rank, weights) in self.pair_weights.iter().enumerate() {
            let mut c = 0.0;
            for &(p, q, w) in weights {
                c += w * hess[(p, q)];
            }
            out.coeffs[rank] = c;
        }
        out
    }

    /// The 2-form together with coefficient gradients from a third jet.
    pub fn two_form_jet(&self, jet: &Jet3) -> TwoFormJet {
        let dim = self.dim;
        let base = self.two_form_from_hess(&jet.h);
        let grads = self
            .pair_weights
            .iter()
            .map(|weights| {
                (0..dim)
                    .map(|r| {
                        let mut c = 0.0;
                        for &(p, q, w) in weights {
                            c += w * jet.third(r, p, q);
                        }
                        c
                    })
                    .collect()
            })
            .collect();
        TwoFormJet {
            dim,
            values: base.coeffs,
            grads,
        }
    }

    /// d of the 2-form, evaluated through the pruned weight tables.
    pub fn d_from_third(&self, jet: &Jet3) -> RealPForm {
        let mut out = RealPForm::zero(self.dim, 3);
        for (rank, weights) in self.d_weights.iter().enumerate() {
            let mut c = 0.0;
            for &(p, q, r, w) in weights {
                c += w * jet.third(p, q, r);
            }
            out.coeffs[rank] = c;
        }
        out
    }

    /// Number of surviving exterior-derivative weights across all
    /// triples. Zero certifies the exact closedness path.
    pub fn surviving_d_weight_count(&self) -> usize {
        self.d_weights.iter().map(Vec::len).sum()
    }
}
