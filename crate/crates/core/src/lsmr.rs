//! Matrix-free LSMR for damped complex least squares,
//! `min ||A x - b||^2 + damp^2 ||x||^2`, needing only products with `A`
//! and `A^H` (Fong and Saunders' bidiagonalization scheme).

use num_complex::Complex;

use crate::scalar::{norm_sqr, Real};

/// A linear map between complex vector spaces, available together with its
/// adjoint.
pub trait LinearOperator<T: Real> {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = A x`
    fn apply(&self, x: &[Complex<T>], y: &mut [Complex<T>]);
    /// `x = A^H y`
    fn apply_adjoint(&self, y: &[Complex<T>], x: &mut [Complex<T>]);
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LsmrParams<T: Real> {
    pub damp: T,
    pub atol: T,
    pub btol: T,
    /// Stop when the condition estimate exceeds this; zero disables the test.
    pub conlim: T,
    pub max_iter: usize,
}

impl<T: Real> Default for LsmrParams<T> {
    fn default() -> Self {
        Self { damp: T::zero(), atol: T::of(1e-10), btol: T::of(1e-10), conlim: T::of(1e12), max_iter: 200 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// `x = 0` is the exact solution.
    ZeroSolution,
    /// `||r|| / ||b||` fell below tolerance.
    Residual,
    /// The normal-equation residual fell below tolerance.
    LeastSquares,
    Ill,
    MaxIter,
}

#[derive(Clone, Debug)]
pub struct LsmrSolution<T: Real> {
    pub x: Vec<Complex<T>>,
    pub iterations: usize,
    pub stop: StopReason,
    /// Estimate of `||[b; 0] - [A; damp I] x||`.
    pub residual_norm: T,
    /// Estimate of `||A^H r - damp^2 x||`.
    pub normal_residual_norm: T,
}

impl<T: Real> LsmrSolution<T> {
    pub fn converged(&self) -> bool {
        !matches!(self.stop, StopReason::MaxIter | StopReason::Ill)
    }
}

/// Stable Givens rotation: returns `(c, s, r)` with `r = hypot(a, b)`.
fn sym_ortho<T: Real>(a: T, b: T) -> (T, T, T) {
    if b == T::zero() {
        let c = if a == T::zero() { T::one() } else { a.signum() };
        (c, T::zero(), a.abs())
    } else if a == T::zero() {
        (T::zero(), b.signum(), b.abs())
    } else if b.abs() > a.abs() {
        let tau = a / b;
        let s = b.signum() / (T::one() + tau * tau).sqrt();
        let c = s * tau;
        (c, s, b / s)
    } else {
        let tau = b / a;
        let c = a.signum() / (T::one() + tau * tau).sqrt();
        let s = c * tau;
        (c, s, a / c)
    }
}

fn scale<T: Real>(v: &mut [Complex<T>], a: T) {
    v.iter_mut().for_each(|z| *z *= a);
}

pub fn lsmr<T: Real, A: LinearOperator<T> + ?Sized>(
    op: &A,
    b: &[Complex<T>],
    params: &LsmrParams<T>,
) -> LsmrSolution<T> {
    let (m, n) = (op.nrows(), op.ncols());
    assert_eq!(b.len(), m, "right-hand side length must equal operator rows");
    let zero = Complex::new(T::zero(), T::zero());
    let damp = params.damp;

    let mut u = b.to_vec();
    let normb = norm_sqr(&u).sqrt();
    let mut beta = normb;
    let mut x = vec![zero; n];
    let mut v = vec![zero; n];
    if beta > T::zero() {
        scale(&mut u, T::one() / beta);
        op.apply_adjoint(&u, &mut v);
    }
    let mut alpha = norm_sqr(&v).sqrt();
    if alpha > T::zero() {
        scale(&mut v, T::one() / alpha);
    }

    let mut zetabar = alpha * beta;
    let mut alphabar = alpha;
    let mut rho = T::one();
    let mut rhobar = T::one();
    let mut cbar = T::one();
    let mut sbar = T::zero();

    let mut h = v.clone();
    let mut hbar = vec![zero; n];

    // ||r|| estimation state
    let mut betadd = beta;
    let mut betad = T::zero();
    let mut rhodold = T::one();
    let mut tautildeold = T::zero();
    let mut thetatilde = T::zero();
    let mut zeta = T::zero();
    let mut d = T::zero();

    // ||A|| and cond(A) estimation state
    let mut norm_a2 = alpha * alpha;
    let mut maxrbar = T::zero();
    let mut minrbar = T::of(1e100);

    let mut normr = beta;
    let mut normar = alpha * beta;

    if normar == T::zero() {
        return LsmrSolution {
            x,
            iterations: 0,
            stop: StopReason::ZeroSolution,
            residual_norm: normr,
            normal_residual_norm: normar,
        };
    }

    let ctol = if params.conlim > T::zero() { T::one() / params.conlim } else { T::zero() };
    let mut av = vec![zero; m];
    let mut atu = vec![zero; n];
    let mut stop = StopReason::MaxIter;
    let mut iterations = 0;

    while iterations < params.max_iter {
        iterations += 1;

        // bidiagonalization step
        op.apply(&v, &mut av);
        for (ui, ai) in u.iter_mut().zip(&av) {
            *ui = *ai - *ui * alpha;
        }
        beta = norm_sqr(&u).sqrt();
        if beta > T::zero() {
            scale(&mut u, T::one() / beta);
            op.apply_adjoint(&u, &mut atu);
            for (vi, ai) in v.iter_mut().zip(&atu) {
                *vi = *ai - *vi * beta;
            }
            alpha = norm_sqr(&v).sqrt();
            if alpha > T::zero() {
                scale(&mut v, T::one() / alpha);
            }
        }

        // rotation eliminating the damping term
        let (chat, shat, alphahat) = sym_ortho(alphabar, damp);

        // plane rotation P_k
        let rhoold = rho;
        let (c, s, rho_new) = sym_ortho(alphahat, beta);
        rho = rho_new;
        let thetanew = s * alpha;
        alphabar = c * alpha;

        // plane rotation Pbar_k
        let rhobarold = rhobar;
        let zetaold = zeta;
        let thetabar = sbar * rho;
        let rhotemp = cbar * rho;
        let (cb, sb, rb) = sym_ortho(cbar * rho, thetanew);
        cbar = cb;
        sbar = sb;
        rhobar = rb;
        zeta = cbar * zetabar;
        zetabar = -sbar * zetabar;

        // update h, hbar, x
        let hbar_coef = thetabar * rho / (rhoold * rhobarold);
        for (hb, hi) in hbar.iter_mut().zip(&h) {
            *hb = *hi - *hb * hbar_coef;
        }
        let x_coef = zeta / (rho * rhobar);
        for (xi, hb) in x.iter_mut().zip(&hbar) {
            *xi += *hb * x_coef;
        }
        let h_coef = thetanew / rho;
        for (hi, vi) in h.iter_mut().zip(&v) {
            *hi = *vi - *hi * h_coef;
        }

        // ||r|| estimate
        let betaacute = chat * betadd;
        let betacheck = -shat * betadd;
        let betahat = c * betaacute;
        betadd = -s * betaacute;
        let thetatildeold = thetatilde;
        let (ctildeold, stildeold, rhotildeold) = sym_ortho(rhodold, thetabar);
        thetatilde = stildeold * rhobar;
        rhodold = ctildeold * rhobar;
        betad = -stildeold * betad + ctildeold * betahat;
        tautildeold = (zetaold - thetatildeold * tautildeold) / rhotildeold;
        let taud = (zeta - thetatilde * tautildeold) / rhodold;
        d += betacheck * betacheck;
        normr = (d + (betad - taud) * (betad - taud) + betadd * betadd).sqrt();

        // ||A|| and cond(A) estimates
        norm_a2 += beta * beta;
        let norm_a = norm_a2.sqrt();
        norm_a2 += alpha * alpha;
        maxrbar = maxrbar.max(rhobarold);
        if iterations > 1 {
            minrbar = minrbar.min(rhobarold);
        }
        let cond_a = maxrbar.max(rhotemp) / minrbar.min(rhotemp);

        normar = zetabar.abs();
        let normx = norm_sqr(&x).sqrt();

        let test1 = normr / normb;
        let test2 = if norm_a * normr != T::zero() { normar / (norm_a * normr) } else { T::infinity() };
        let test3 = T::one() / cond_a;
        let rtol = params.btol + params.atol * norm_a * normx / normb;

        if test1 <= rtol {
            stop = StopReason::Residual;
            break;
        }
        if test2 <= params.atol {
            stop = StopReason::LeastSquares;
            break;
        }
        if test3 <= ctol {
            stop = StopReason::Ill;
            break;
        }
    }

    LsmrSolution { x, iterations, stop, residual_norm: normr, normal_residual_norm: normar }
}
