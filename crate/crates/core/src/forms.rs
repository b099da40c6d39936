//! Pointwise differential forms over 2n real coordinates.
//!
//! [`RealPForm`] stores fully antisymmetric coefficients on sorted index
//! combinations. [`OneFormJet`] and [`TwoFormJet`] pair coefficients with
//! their first derivatives so the exterior derivative is assembled from
//! jets, never from differencing field evaluations. [`Herm1`] is the
//! Hermitian-matrix view of a (1,1)-form together with entry gradients.
//!
//! Convention for the whole crate: a (1,1)-form is written
//! omega = i sum H_ab dz_a wedge dzbar_b with H Hermitian, and omega is
//! positive exactly when H is positive definite.

use crate::error::{Error, Result};
use crate::tol::HERMITIAN_SLACK;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

fn binom(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Lexicographic rank of a strictly increasing index combination.
pub fn combo_rank(dim: usize, combo: &[usize]) -> usize {
    let p = combo.len();
    let mut rank = 0;
    let mut prev = 0;
    for (pos, &c) in combo.iter().enumerate() {
        for a in prev..c {
            rank += binom(dim - 1 - a, p - 1 - pos);
        }
        prev = c + 1;
    }
    rank
}

/// All strictly increasing combinations of length `p` from `0..dim`.
pub fn combinations(dim: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binom(dim, p));
    let mut cur: Vec<usize> = (0..p).collect();
    if p == 0 {
        return vec![vec![]];
    }
    if p > dim {
        return out;
    }
    loop {
        out.push(cur.clone());
        // Advance to the next combination.
        let mut i = p;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + dim - p {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..p {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Sorts indices, returning the permutation sign, or None on a repeat.
fn sort_signed(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in idx.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some(sign)
}

/// A degree-p form with real coefficients on sorted index combinations.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPForm {
    pub dim: usize,
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl RealPForm {
    pub fn zero(dim: usize, degree: usize) -> Self {
        RealPForm {
            dim,
            degree,
            coeffs: vec![0.0; binom(dim, degree)],
        }
    }

    /// Adds `c` times dx_{idx}, sorting the indices with sign.
    pub fn add_term(&mut self, idx: &[usize], c: f64) {
        let mut sorted = idx.to_vec();
        if let Some(sign) = sort_signed(&mut sorted) {
            let r = combo_rank(self.dim, &sorted);
            self.coeffs[r] += sign * c;
        }
    }

    /// Coefficient of dx_{idx} for any index order, zero on repeats.
    pub fn coeff(&self, idx: &[usize]) -> f64 {
        let mut sorted = idx.to_vec();
        match sort_signed(&mut sorted) {
            Some(sign) => sign * self.coeffs[combo_rank(self.dim, &sorted)],
            None => 0.0,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (rhs.dim, rhs.degree));
        RealPForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        assert_eq!((self.dim, self.degree), (rhs.dim, rhs.degree));
        RealPForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        RealPForm {
            dim: self.dim,
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|a| c * a).collect(),
        }
    }

    /// Evaluates on `degree` tangent vectors (minor determinants).
    pub fn eval(&self, vectors: &[DVector<f64>]) -> f64 {
        assert_eq!(vectors.len(), self.degree);
        let combos = combinations(self.dim, self.degree);
        let mut total = 0.0;
        for (rank, combo) in combos.iter().enumerate() {
            let c = self.coeffs[rank];
            if c == 0.0 {
                continue;
            }
            let det = match self.degree {
                1 => vectors[0][combo[0]],
                2 => {
                    vectors[0][combo[0]] * vectors[1][combo[1]]
                        - vectors[0][combo[1]] * vectors[1][combo[0]]
                }
                3 => {
                    let m = |r: usize, c_: usize| vectors[c_][combo[r]];
                    m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1))
                        - m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0))
                        + m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0))
                }
                d => panic!("evaluation not implemented for degree {d}"),
            };
            total += c * det;
        }
        total
    }
}

/// Graded-antisymmetric wedge product.
pub fn wedge(a: &RealPForm, b: &RealPForm) -> Result<RealPForm> {
    assert_eq!(a.dim, b.dim);
    if a.degree + b.degree > a.dim {
        return Err(Error::DegreeOverflow(a.degree, b.degree, a.dim));
    }
    let mut out = RealPForm::zero(a.dim, a.degree + b.degree);
    let ca = combinations(a.dim, a.degree);
    let cb = combinations(b.dim, b.degree);
    let mut idx = Vec::with_capacity(a.degree + b.degree);
    for (ra, ka) in ca.iter().enumerate() {
        let va = a.coeffs[ra];
        if va == 0.0 {
            continue;
        }
        for (rb, kb) in cb.iter().enumerate() {
            let vb = b.coeffs[rb];
            if vb == 0.0 {
                continue;
            }
            idx.clear();
            idx.extend_from_slice(ka);
            idx.extend_from_slice(kb);
            out.add_term(&idx, va * vb);
        }
    }
    Ok(out)
}

/// A 1-form whose coefficients carry their first derivatives.
/// `grads[j][i]` is the i-th partial of the coefficient of dx_j.
#[derive(Clone, Debug)]
pub struct OneFormJet {
    pub dim: usize,
    pub values: Vec<f64>,
    pub grads: Vec<Vec<f64>>,
}

impl OneFormJet {
    /// The differential of a scalar jet as a 1-form with derivatives:
    /// values are the gradient, coefficient gradients are the Hessian.
    pub fn from_gradient_jet(jet: &crate::jets::Jet2) -> Self {
        let dim = jet.dim();
        let values: Vec<f64> = (0..dim).map(|j| jet.g[j]).collect();
        let grads: Vec<Vec<f64>> = (0..dim)
            .map(|j| (0..dim).map(|i| jet.h[(j, i)]).collect())
            .collect();
        OneFormJet { dim, values, grads }
    }

    pub fn one_form(&self) -> RealPForm {
        RealPForm {
            dim: self.dim,
            degree: 1,
            coeffs: self.values.clone(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// d(sum a_j dx_j) = sum_{i<j} (d_i a_j - d_j a_i) dx_i dx_j.
    pub fn d(&self) -> RealPForm {
        let mut out = RealPForm::zero(self.dim, 2);
        for combo in combinations(self.dim, 2) {
            let (i, j) = (combo[0], combo[1]);
            let c = self.grads[j][i] - self.grads[i][j];
            out.coeffs[combo_rank(self.dim, &combo)] = c;
        }
        out
    }
}

/// A 2-form whose coefficients carry their first derivatives, indexed by
/// sorted pair rank. `grads[r][i]` is the i-th partial of coefficient r.
#[derive(Clone, Debug)]
pub struct TwoFormJet {
    pub dim: usize,
    pub values: Vec<f64>,
    pub grads: Vec<Vec<f64>>,
}

impl TwoFormJet {
    pub fn two_form(&self) -> RealPForm {
        RealPForm {
            dim: self.dim,
            degree: 2,
            coeffs: self.values.clone(),
        }
    }

    /// Pointwise product with a scalar function given by value and
    /// gradient, with the product rule applied to coefficient gradients.
    pub fn scale_by_function(&self, value: f64, grad: &[f64]) -> TwoFormJet {
        assert_eq!(grad.len(), self.dim);
        let values: Vec<f64> = self.values.iter().map(|w| value * w).collect();
        let grads: Vec<Vec<f64>> = self
            .values
            .iter()
            .zip(&self.grads)
            .map(|(w, gw)| {
                (0..self.dim)
                    .map(|i| value * gw[i] + grad[i] * w)
                    .collect()
            })
            .collect();
        TwoFormJet {
            dim: self.dim,
            values,
            grads,
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// d(sum w_jk dx_j dx_k) with the standard antisymmetrized formula:
    /// coefficient of dx_i dx_j dx_k is d_i w_jk - d_j w_ik + d_k w_ij.
    pub fn d(&self) -> RealPForm {
        let mut out = RealPForm::zero(self.dim, 3);
        for combo in combinations(self.dim, 3) {
            let (i, j, k) = (combo[0], combo[1], combo[2]);
            let rjk = combo_rank(self.dim, &[j, k]);
            let rik = combo_rank(self.dim, &[i, k]);
            let rij = combo_rank(self.dim, &[i, j]);
            let c = self.grads[rjk][i] - self.grads[rik][j] + self.grads[rij][k];
            out.coeffs[combo_rank(self.dim, &combo)] = c;
        }
        out
    }
}

/// A Hermitian coefficient matrix together with its entry gradients over
/// the 2n real coordinates: `grad[r]` is the entrywise r-th partial.
#[derive(Clone, Debug)]
pub struct Herm1 {
    pub value: DMatrix<Complex64>,
    pub grad: Vec<DMatrix<Complex64>>,
}

fn check_hermitian(h: &DMatrix<Complex64>) -> Result<()> {
    let dev = crate::linalg::hermitian_deviation(h);
    let scale = h.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    if dev > HERMITIAN_SLACK * (1.0 + scale) {
        return Err(Error::NonHermitian(dev));
    }
    Ok(())
}

/// Expands i sum H_ab dz_a dzbar_b into real coordinates:
/// 2 Re H_ab on dx_a dy_b, and -2 Im H_ab on dx_a dx_b and dy_a dy_b.
pub fn herm_to_real2form(h: &DMatrix<Complex64>) -> Result<RealPForm> {
    check_hermitian(h)?;
    let n = h.nrows();
    let mut out = RealPForm::zero(2 * n, 2);
    for a in 0..n {
        for b in 0..n {
            out.add_term(&[2 * a, 2 * b + 1], 2.0 * h[(a, b)].re);
            if a < b {
                out.add_term(&[2 * a, 2 * b], -2.0 * h[(a, b)].im);
                out.add_term(&[2 * a + 1, 2 * b + 1], -2.0 * h[(a, b)].im);
            }
        }
    }
    Ok(out)
}

/// Reads the Hermitian matrix back out of a real (1,1) 2-form.
pub fn real2form_to_herm(form: &RealPForm) -> Result<DMatrix<Complex64>> {
    assert_eq!(form.degree, 2);
    if !form.dim.is_multiple_of(2) {
        return Err(Error::Config(format!(
            "real dimension {} is not even",
            form.dim
        )));
    }
    let n = form.dim / 2;
    let mut h = DMatrix::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            let p = 0.5 * form.coeff(&[2 * a, 2 * b + 1]);
            let q = if a == b {
                0.0
            } else {
                -0.5 * form.coeff(&[2 * a, 2 * b])
            };
            h[(a, b)] = Complex64::new(p, q);
        }
    }
    Ok(h)
}

/// Applies the same expansion to value and gradients, giving a 2-form
/// with coefficient derivatives ready for the exterior derivative.
pub fn herm1_to_two_form_jet(h: &Herm1) -> Result<TwoFormJet> {
    check_hermitian(&h.value)?;
    let n = h.value.nrows();
    let dim = 2 * n;
    let npairs = binom(dim, 2);
    let mut values = vec![0.0; npairs];
    let mut grads = vec![vec![0.0; dim]; npairs];
    let put = |a: usize, b: usize, re_part: bool, sign: f64, values: &mut Vec<f64>, grads: &mut Vec<Vec<f64>>| {
        let mut idx = if re_part {
            [2 * a, 2 * b + 1]
        } else {
            [2 * a, 2 * b]
        };
        let take = |m: &DMatrix<Complex64>| {
            if re_part {
                2.0 * m[(a, b)].re
            } else {
                -2.0 * m[(a, b)].im
            }
        };
        let s = sort_signed(&mut idx).expect("distinct indices") * sign;
        let r = combo_rank(dim, &idx);
        values[r] += s * take(&h.value);
        for (slot, g) in grads[r].iter_mut().zip(h.grad.iter()) {
            *slot += s * take(g);
        }
        // The dy_a dy_b companion of the dx_a dx_b term.
        if !re_part {
            let mut idx2 = [2 * a + 1, 2 * b + 1];
            let s2 = sort_signed(&mut idx2).expect("distinct indices") * sign;
            let r2 = combo_rank(dim, &idx2);
            values[r2] += s2 * take(&h.value);
            for (slot, g) in grads[r2].iter_mut().zip(h.grad.iter()) {
                *slot += s2 * take(g);
            }
        }
    };
    for a in 0..n {
        for b in 0..n {
            put(a, b, true, 1.0, &mut values, &mut grads);
            if a < b {
                put(a, b, false, 1.0, &mut values, &mut grads);
            }
        }
    }
    Ok(TwoFormJet { dim, values, grads })
}

/// Multiplication by i on real tangent vectors in interleaved layout.
pub fn j_times(v: &DVector<f64>) -> DVector<f64> {
    let dim = v.len();
    let mut out = DVector::zeros(dim);
    for a in 0..dim / 2 {
        out[2 * a] = -v[2 * a + 1];
        out[2 * a + 1] = v[2 * a];
    }
    out
}

/// Complex components of a real tangent vector: vhat_a = v_x + i v_y.
pub fn complexify(v: &DVector<f64>) -> Vec<Complex64> {
    (0..v.len() / 2)
        .map(|a| Complex64::new(v[2 * a], v[2 * a + 1]))
        .collect()
}

/// The action of i sum H_ab dz_a dzbar_b on (v, Jv):
/// 2 sum H_ab vhat_a conj(vhat_b), a real number for Hermitian H.
pub fn pairing(h: &DMatrix<Complex64>, v: &DVector<f64>) -> f64 {
    let vh = complexify(v);
    let n = h.nrows();
    let mut s = Complex64::new(0.0, 0.0);
    for a in 0..n {
        for b in 0..n {
            s += h[(a, b)] * vh[a] * vh[b].conj();
        }
    }
    2.0 * s.re
}
