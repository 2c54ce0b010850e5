//! Real Schur decomposition and eigenvalue reordering.
//!
//! The QR iteration follows LAPACK's small-matrix double-shift algorithm
//! (`dlahqr`), including its exceptional shifts and the `dlanv2`
//! standardization of 2x2 blocks. Reordering swaps adjacent blocks with the
//! direct (Sylvester + QR) method.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{ensure_finite, ensure_square, max_abs, solve_small, unvec, vec_of};
use crate::error::{Error, Result};

const EXCEPTIONAL_EVERY: usize = 10;
const EXC_DAT1: f64 = 0.75;
const EXC_DAT2: f64 = -0.4375;

/// `m = u t uᵀ` with `u` orthogonal and `t` upper quasi-triangular.
#[derive(Debug, Clone)]
pub struct RealSchur {
    pub u: DMatrix<f64>,
    pub t: DMatrix<f64>,
}

/// A diagonal block of a quasi-triangular matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    pub start: usize,
    pub size: usize,
}

impl RealSchur {
    pub fn blocks(&self) -> Vec<Block> {
        blocks_of(&self.t)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        eigenvalues_of(&self.t)
    }
}

/// Real Schur form whose diagonal blocks have non-decreasing eigenvalue modulus.
#[derive(Debug, Clone)]
pub struct OrderedSchur {
    pub u: DMatrix<f64>,
    pub t: DMatrix<f64>,
    pub blocks: Vec<Block>,
    pub eigenvalues: Vec<Complex64>,
}

impl OrderedSchur {
    /// Whether a block boundary sits between index `k - 1` and `k`.
    pub fn is_boundary(&self, k: usize) -> bool {
        k == 0 || self.blocks.iter().any(|b| b.start + b.size == k)
    }
}

pub fn blocks_of(t: &DMatrix<f64>) -> Vec<Block> {
    let n = t.nrows();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        if i + 1 < n && t[(i + 1, i)] != 0.0 {
            out.push(Block { start: i, size: 2 });
            i += 2;
        } else {
            out.push(Block { start: i, size: 1 });
            i += 1;
        }
    }
    out
}

fn block_eigenvalues(t: &DMatrix<f64>, b: Block) -> Vec<Complex64> {
    let i = b.start;
    if b.size == 1 {
        return vec![Complex64::new(t[(i, i)], 0.0)];
    }
    let (a, bb, c, d) = (t[(i, i)], t[(i, i + 1)], t[(i + 1, i)], t[(i + 1, i + 1)]);
    let p = 0.5 * (a - d);
    let disc = p * p + bb * c;
    let mid = 0.5 * (a + d);
    if disc >= 0.0 {
        let r = disc.sqrt();
        vec![Complex64::new(mid + r, 0.0), Complex64::new(mid - r, 0.0)]
    } else {
        let im = (-disc).sqrt();
        vec![Complex64::new(mid, im), Complex64::new(mid, -im)]
    }
}

pub fn eigenvalues_of(t: &DMatrix<f64>) -> Vec<Complex64> {
    blocks_of(t)
        .into_iter()
        .flat_map(|b| block_eigenvalues(t, b))
        .collect()
}

fn block_modulus(t: &DMatrix<f64>, b: Block) -> f64 {
    block_eigenvalues(t, b)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

pub fn real_schur(m: &DMatrix<f64>) -> Result<RealSchur> {
    ensure_square(m, "schur input")?;
    ensure_finite(m, "schur input")?;
    let n = m.nrows();
    if n == 0 {
        return Err(Error::InvalidArgument("schur input is empty".into()));
    }
    let (mut z, mut h) = nalgebra::Hessenberg::new(m.clone()).unpack();
    hqr(&mut h, &mut z).map_err(|_| Error::NoConvergence {
        routine: "real schur",
        size: n,
    })?;
    Ok(RealSchur { u: z, t: h })
}

/// Householder reflector `(I - tau v vᵀ)` mapping `(alpha, x)` to `(beta, 0)`.
/// On return `x` holds `v[1..]` and the result is `(beta, tau)`.
fn dlarfg(alpha: f64, x: &mut [f64]) -> (f64, f64) {
    let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if xnorm == 0.0 {
        return (alpha, 0.0);
    }
    let beta = -alpha.signum() * alpha.hypot(xnorm);
    let tau = (beta - alpha) / beta;
    let scale = 1.0 / (alpha - beta);
    for v in x.iter_mut() {
        *v *= scale;
    }
    (beta, tau)
}

/// Standardized form of a real 2x2 block. Returns `(a, b, c, d, cs, sn)`
/// where `[a b; c d] = Gᵀ [a0 b0; c0 d0] G`, `G = [cs -sn; sn cs]`.
#[allow(clippy::many_single_char_names)]
pub(crate) fn dlanv2(
    mut a: f64,
    mut b: f64,
    mut c: f64,
    mut d: f64,
) -> (f64, f64, f64, f64, f64, f64) {
    const MULTPL: f64 = 4.0;
    let eps = f64::EPSILON;
    let safmin = f64::MIN_POSITIVE;
    let safmn2 = 2f64.powi(((safmin / eps).ln() / 2f64.ln() / 2.0) as i32);
    let safmx2 = 1.0 / safmn2;
    let (cs, sn);
    if c == 0.0 {
        cs = 1.0;
        sn = 0.0;
    } else if b == 0.0 {
        cs = 0.0;
        sn = 1.0;
        std::mem::swap(&mut a, &mut d);
        b = -c;
        c = 0.0;
    } else if (a - d) == 0.0 && b.signum() != c.signum() {
        cs = 1.0;
        sn = 0.0;
    } else {
        let temp = a - d;
        let mut p = 0.5 * temp;
        let bcmax = b.abs().max(c.abs());
        let bcmis = b.abs().min(c.abs()) * b.signum() * c.signum();
        let scale = p.abs().max(bcmax);
        let mut z = (p / scale) * p + (bcmax / scale) * bcmis;
        if z >= MULTPL * eps {
            // real eigenvalues
            z = p + p.signum() * scale.sqrt() * z.sqrt();
            a = d + z;
            d -= (bcmax / z) * bcmis;
            let tau = c.hypot(z);
            cs = z / tau;
            sn = c / tau;
            b -= c;
            c = 0.0;
        } else {
            // complex or nearly equal real eigenvalues: equalize the diagonal
            let mut count = 0;
            let mut sigma = b + c;
            let mut temp = temp;
            loop {
                count += 1;
                let sc = temp.abs().max(sigma.abs());
                if sc >= safmx2 {
                    sigma *= safmn2;
                    temp *= safmn2;
                    if count <= 20 {
                        continue;
                    }
                }
                if sc <= safmn2 {
                    sigma *= safmx2;
                    temp *= safmx2;
                    if count <= 20 {
                        continue;
                    }
                }
                break;
            }
            p = 0.5 * temp;
            let mut tau = sigma.hypot(temp);
            let mut cs1 = (0.5 * (1.0 + sigma.abs() / tau)).sqrt();
            let mut sn1 = -(p / (tau * cs1)) * sigma.signum();
            // [aa bb; cc dd] = [a b; c d] [cs1 -sn1; sn1 cs1]
            let aa = a * cs1 + b * sn1;
            let bb = -a * sn1 + b * cs1;
            let cc = c * cs1 + d * sn1;
            let dd = -c * sn1 + d * cs1;
            // [a b; c d] = [cs1 sn1; -sn1 cs1] [aa bb; cc dd]
            a = aa * cs1 + cc * sn1;
            b = bb * cs1 + dd * sn1;
            c = -aa * sn1 + cc * cs1;
            d = -bb * sn1 + dd * cs1;
            let temp2 = 0.5 * (a + d);
            a = temp2;
            d = temp2;
            if c != 0.0 {
                if b != 0.0 {
                    if b.signum() == c.signum() {
                        // real eigenvalues: reduce to upper triangular
                        let sab = b.abs().sqrt();
                        let sac = c.abs().sqrt();
                        p = sab * sac * c.signum();
                        tau = 1.0 / (b + c).abs().sqrt();
                        a = temp2 + p;
                        d = temp2 - p;
                        b -= c;
                        c = 0.0;
                        let cs2 = sab * tau;
                        let sn2 = sac * tau;
                        let t = cs1 * cs2 - sn1 * sn2;
                        sn1 = cs1 * sn2 + sn1 * cs2;
                        cs1 = t;
                    }
                } else {
                    b = -c;
                    c = 0.0;
                    let t = cs1;
                    cs1 = -sn1;
                    sn1 = t;
                }
            }
            cs = cs1;
            sn = sn1;
        }
    }
    (a, b, c, d, cs, sn)
}

/// Plane rotation of rows `r1, r2` over columns `cols` (BLAS `drot`).
fn rot_rows(m: &mut DMatrix<f64>, r1: usize, r2: usize, cols: std::ops::Range<usize>, cs: f64, sn: f64) {
    for j in cols {
        let x = m[(r1, j)];
        let y = m[(r2, j)];
        m[(r1, j)] = cs * x + sn * y;
        m[(r2, j)] = cs * y - sn * x;
    }
}

fn rot_cols(m: &mut DMatrix<f64>, c1: usize, c2: usize, rows: std::ops::Range<usize>, cs: f64, sn: f64) {
    for i in rows {
        let x = m[(i, c1)];
        let y = m[(i, c2)];
        m[(i, c1)] = cs * x + sn * y;
        m[(i, c2)] = cs * y - sn * x;
    }
}

/// Standardizes the 2x2 block at `j` in place, updating `u`.
fn standardize(t: &mut DMatrix<f64>, u: &mut DMatrix<f64>, j: usize) {
    let n = t.nrows();
    let (a, b, c, d, cs, sn) = dlanv2(t[(j, j)], t[(j, j + 1)], t[(j + 1, j)], t[(j + 1, j + 1)]);
    t[(j, j)] = a;
    t[(j, j + 1)] = b;
    t[(j + 1, j)] = c;
    t[(j + 1, j + 1)] = d;
    rot_rows(t, j, j + 1, j + 2..n, cs, sn);
    rot_cols(t, j, j + 1, 0..j, cs, sn);
    let un = u.nrows();
    rot_cols(u, j, j + 1, 0..un, cs, sn);
}

/// Double-shift QR iteration on an upper Hessenberg matrix, accumulating
/// the transformations into `z`. On failure returns the unconverged index.
#[allow(clippy::many_single_char_names)]
fn hqr(h: &mut DMatrix<f64>, z: &mut DMatrix<f64>) -> std::result::Result<(), usize> {
    let n = h.nrows();
    if n == 0 {
        return Ok(());
    }
    for j in 0..n.saturating_sub(3) {
        h[(j + 2, j)] = 0.0;
        h[(j + 3, j)] = 0.0;
    }
    if n >= 3 {
        h[(n - 1, n - 3)] = 0.0;
    }
    let ilo = 0usize;
    let ihi = n - 1;
    let ulp = f64::EPSILON;
    let smlnum = f64::MIN_POSITIVE * (n as f64 / ulp);
    let i1 = 0usize;
    let i2 = n - 1;
    let itmax = 30 * n.max(10);
    let nz = z.nrows();
    let mut kdefl = 0usize;
    let mut i = ihi;

    loop {
        let mut l = ilo;
        let mut converged = false;
        for _its in 0..=itmax {
            // look for a single small subdiagonal element
            let mut k = i;
            while k > l {
                if h[(k, k - 1)].abs() <= smlnum {
                    break;
                }
                let mut tst = h[(k - 1, k - 1)].abs() + h[(k, k)].abs();
                if tst == 0.0 {
                    if k >= ilo + 2 {
                        tst += h[(k - 1, k - 2)].abs();
                    }
                    if k < ihi {
                        tst += h[(k + 1, k)].abs();
                    }
                }
                if h[(k, k - 1)].abs() <= ulp * tst {
                    let ab = h[(k, k - 1)].abs().max(h[(k - 1, k)].abs());
                    let ba = h[(k, k - 1)].abs().min(h[(k - 1, k)].abs());
                    let aa = h[(k, k)].abs().max((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let bb = h[(k, k)].abs().min((h[(k - 1, k - 1)] - h[(k, k)]).abs());
                    let s = aa + ab;
                    if ba * (ab / s) <= smlnum.max(ulp * (bb * (aa / s))) {
                        break;
                    }
                }
                k -= 1;
            }
            l = k;
            if l > ilo {
                h[(l, l - 1)] = 0.0;
            }
            if l + 1 >= i {
                converged = true;
                break;
            }
            kdefl += 1;

            let (h11, h12, h21, h22);
            if kdefl % (2 * EXCEPTIONAL_EVERY) == 0 {
                let s = h[(i, i - 1)].abs() + h[(i - 1, i - 2)].abs();
                h11 = EXC_DAT1 * s + h[(i, i)];
                h12 = EXC_DAT2 * s;
                h21 = s;
                h22 = h11;
            } else if kdefl % EXCEPTIONAL_EVERY == 0 {
                let s = h[(l + 1, l)].abs() + h[(l + 2, l + 1)].abs();
                h11 = EXC_DAT1 * s + h[(l, l)];
                h12 = EXC_DAT2 * s;
                h21 = s;
                h22 = h11;
            } else {
                h11 = h[(i - 1, i - 1)];
                h21 = h[(i, i - 1)];
                h12 = h[(i - 1, i)];
                h22 = h[(i, i)];
            }
            let s = h11.abs() + h12.abs() + h21.abs() + h22.abs();
            let (rt1r, rt1i, rt2r, rt2i);
            if s == 0.0 {
                rt1r = 0.0;
                rt1i = 0.0;
                rt2r = 0.0;
                rt2i = 0.0;
            } else {
                let (h11, h12, h21, h22) = (h11 / s, h12 / s, h21 / s, h22 / s);
                let tr = (h11 + h22) / 2.0;
                let det = (h11 - tr) * (h22 - tr) - h12 * h21;
                let rtdisc = det.abs().sqrt();
                if det >= 0.0 {
                    rt1r = tr * s;
                    rt2r = rt1r;
                    rt1i = rtdisc * s;
                    rt2i = -rt1i;
                } else {
                    let mut a = tr + rtdisc;
                    let mut b = tr - rtdisc;
                    a = if (a - h22).abs() <= (b - h22).abs() { a * s } else { b * s };
                    b = a;
                    rt1r = a;
                    rt2r = b;
                    rt1i = 0.0;
                    rt2i = 0.0;
                }
            }

            // look for two consecutive small subdiagonal elements
            let mut m = i - 2;
            let mut v = [0.0f64; 3];
            loop {
                let mut h21s = h[(m + 1, m)];
                let s = (h[(m, m)] - rt2r).abs() + rt2i.abs() + h21s.abs();
                h21s = h[(m + 1, m)] / s;
                v[0] = h21s * h[(m, m + 1)] + (h[(m, m)] - rt1r) * ((h[(m, m)] - rt2r) / s)
                    - rt1i * (rt2i / s);
                v[1] = h21s * (h[(m, m)] + h[(m + 1, m + 1)] - rt1r - rt2r);
                v[2] = h21s * h[(m + 2, m + 1)];
                let s = v[0].abs() + v[1].abs() + v[2].abs();
                v[0] /= s;
                v[1] /= s;
                v[2] /= s;
                if m == l {
                    break;
                }
                let h00 = h[(m, m - 1)].abs() * (v[1].abs() + v[2].abs());
                let h01 = v[0].abs()
                    * (h[(m - 1, m - 1)].abs() + h[(m, m)].abs() + h[(m + 1, m + 1)].abs());
                if h00 <= ulp * h01 {
                    break;
                }
                m -= 1;
            }

            // double-shift QR sweep
            for k in m..i {
                let nr = 3.min(i - k + 1);
                if k > m {
                    for (idx, slot) in v.iter_mut().enumerate().take(nr) {
                        *slot = h[(k + idx, k - 1)];
                    }
                }
                let (beta, t1) = dlarfg(v[0], &mut v[1..nr]);
                v[0] = beta;
                if k > m {
                    h[(k, k - 1)] = v[0];
                    h[(k + 1, k - 1)] = 0.0;
                    if k + 1 < i {
                        h[(k + 2, k - 1)] = 0.0;
                    }
                } else if m > l {
                    h[(k, k - 1)] *= 1.0 - t1;
                }
                let v2 = v[1];
                let t2 = t1 * v2;
                if nr == 3 {
                    let v3 = v[2];
                    let t3 = t1 * v3;
                    for j in k..=i2 {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)] + v3 * h[(k + 2, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                        h[(k + 2, j)] -= sum * t3;
                    }
                    for j in i1..=(k + 3).min(i) {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)] + v3 * h[(j, k + 2)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                        h[(j, k + 2)] -= sum * t3;
                    }
                    for j in 0..nz {
                        let sum = z[(j, k)] + v2 * z[(j, k + 1)] + v3 * z[(j, k + 2)];
                        z[(j, k)] -= sum * t1;
                        z[(j, k + 1)] -= sum * t2;
                        z[(j, k + 2)] -= sum * t3;
                    }
                } else if nr == 2 {
                    for j in k..=i2 {
                        let sum = h[(k, j)] + v2 * h[(k + 1, j)];
                        h[(k, j)] -= sum * t1;
                        h[(k + 1, j)] -= sum * t2;
                    }
                    for j in i1..=i {
                        let sum = h[(j, k)] + v2 * h[(j, k + 1)];
                        h[(j, k)] -= sum * t1;
                        h[(j, k + 1)] -= sum * t2;
                    }
                    for j in 0..nz {
                        let sum = z[(j, k)] + v2 * z[(j, k + 1)];
                        z[(j, k)] -= sum * t1;
                        z[(j, k + 1)] -= sum * t2;
                    }
                }
            }
        }
        if !converged {
            return Err(i);
        }
        if l + 1 == i {
            let (a, b, c, d, cs, sn) =
                dlanv2(h[(i - 1, i - 1)], h[(i - 1, i)], h[(i, i - 1)], h[(i, i)]);
            h[(i - 1, i - 1)] = a;
            h[(i - 1, i)] = b;
            h[(i, i - 1)] = c;
            h[(i, i)] = d;
            if i2 > i {
                rot_rows(h, i - 1, i, i + 1..i2 + 1, cs, sn);
            }
            rot_cols(h, i - 1, i, i1..i - 1, cs, sn);
            rot_cols(z, i - 1, i, 0..nz, cs, sn);
        }
        kdefl = 0;
        if l == 0 {
            break;
        }
        i = l - 1;
    }
    Ok(())
}

/// Swaps the adjacent diagonal blocks of sizes `p` and `q` starting at `j`.
fn swap_blocks(t: &mut DMatrix<f64>, u: &mut DMatrix<f64>, j: usize, p: usize, q: usize) -> Result<()> {
    let n = t.nrows();
    let m = p + q;
    let a11 = t.view((j, j), (p, p)).clone_owned();
    let a12 = t.view((j, j + p), (p, q)).clone_owned();
    let a22 = t.view((j + p, j + p), (q, q)).clone_owned();
    let local_norm = max_abs(&t.view((j, j), (m, m)).clone_owned());

    // a11 x - x a22 = a12
    let kron = DMatrix::<f64>::identity(q, q).kronecker(&a11)
        - a22.transpose().kronecker(&DMatrix::<f64>::identity(p, p));
    let x = unvec(&solve_small(kron, &vec_of(&a12), "schur block swap")?, p, q);

    let mut s = DMatrix::<f64>::zeros(m, m);
    s.view_mut((0, 0), (p, q)).copy_from(&(-&x));
    s.view_mut((0, q), (p, p)).fill_with_identity();
    s.view_mut((p, 0), (q, q)).fill_with_identity();
    let qm = s.qr().q();

    let rows = t.view((j, 0), (m, n)).clone_owned();
    t.view_mut((j, 0), (m, n)).copy_from(&(qm.transpose() * rows));
    let cols = t.view((0, j), (n, m)).clone_owned();
    t.view_mut((0, j), (n, m)).copy_from(&(cols * &qm));
    let un = u.nrows();
    let ucols = u.view((0, j), (un, m)).clone_owned();
    u.view_mut((0, j), (un, m)).copy_from(&(ucols * &qm));

    let leak = max_abs(&t.view((j + q, j), (p, q)).clone_owned());
    if leak > 100.0 * f64::EPSILON * local_norm.max(f64::MIN_POSITIVE) {
        return Err(Error::Residual {
            what: "schur block swap",
            residual: leak,
            bound: 100.0 * f64::EPSILON * local_norm,
        });
    }
    t.view_mut((j + q, j), (p, q)).fill(0.0);
    if q == 2 {
        standardize(t, u, j);
    }
    if p == 2 {
        standardize(t, u, j + q);
    }
    Ok(())
}

/// Real Schur form with eigenvalues sorted by ascending modulus.
pub fn ordered_schur(m: &DMatrix<f64>) -> Result<OrderedSchur> {
    let RealSchur { mut u, mut t } = real_schur(m)?;
    let n = t.nrows();
    let limit = 10 * n * n + 10;
    let mut swaps = 0;
    'sort: loop {
        let blocks = blocks_of(&t);
        for w in blocks.windows(2) {
            let (b0, b1) = (w[0], w[1]);
            let m0 = block_modulus(&t, b0);
            let m1 = block_modulus(&t, b1);
            if m0 - m1 > 8.0 * f64::EPSILON * m0.max(f64::MIN_POSITIVE) {
                swap_blocks(&mut t, &mut u, b0.start, b0.size, b1.size)?;
                swaps += 1;
                if swaps > limit {
                    return Err(Error::NoConvergence {
                        routine: "schur reordering",
                        size: n,
                    });
                }
                continue 'sort;
            }
        }
        break;
    }
    let blocks = blocks_of(&t);
    let eigenvalues = eigenvalues_of(&t);
    Ok(OrderedSchur {
        u,
        t,
        blocks,
        eigenvalues,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check_decomposition(m: &DMatrix<f64>, u: &DMatrix<f64>, t: &DMatrix<f64>) {
        let n = m.nrows();
        let scale = max_abs(m).max(1.0);
        let orth = max_abs(&(u.transpose() * u - DMatrix::identity(n, n)));
        assert!(orth < 1e-12 * n as f64, "orthogonality {orth}");
        let rec = max_abs(&(u * t * u.transpose() - m));
        assert!(rec < 1e-12 * scale * n as f64, "reconstruction {rec}");
        for i in 0..n {
            for j in 0..i.saturating_sub(1) {
                assert_eq!(t[(i, j)], 0.0);
            }
        }
        for b in blocks_of(t) {
            if b.size == 2 {
                let i = b.start;
                assert_eq!(t[(i, i)], t[(i + 1, i + 1)], "standardized diagonal");
                assert!(t[(i, i + 1)] * t[(i + 1, i)] < 0.0, "complex pair");
            }
        }
        for w in blocks_of(t).windows(2) {
            assert_eq!(w[0].start + w[0].size, w[1].start);
        }
    }

    fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
        DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0))
    }

    #[test]
    fn schur_of_random_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 1..=12 {
            for _ in 0..5 {
                let m = random_matrix(&mut rng, n);
                let s = real_schur(&m).unwrap();
                check_decomposition(&m, &s.u, &s.t);
                let tr: f64 = s.eigenvalues().iter().map(|z| z.re).sum();
                assert!((tr - m.trace()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn schur_of_cyclic_shift_converges() {
        for n in [2, 3, 5, 8, 16, 50] {
            let m = DMatrix::from_fn(n, n, |i, j| if i == (j + 1) % n { 0.95 } else { 0.0 });
            let s = real_schur(&m).unwrap();
            check_decomposition(&m, &s.u, &s.t);
            for z in s.eigenvalues() {
                assert!((z.norm() - 0.95).abs() < 1e-10, "{z}");
            }
        }
    }

    #[test]
    fn schur_of_triangular_and_zero() {
        let z = DMatrix::<f64>::zeros(4, 4);
        let s = real_schur(&z).unwrap();
        check_decomposition(&z, &s.u, &s.t);
        let tri = DMatrix::from_row_slice(3, 3, &[1.0, 2.0, 3.0, 0.0, 4.0, 5.0, 0.0, 0.0, 6.0]);
        let mut ev: Vec<f64> = real_schur(&tri).unwrap().eigenvalues().iter().map(|z| z.re).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ev[0] - 1.0).abs() < 1e-12 && (ev[1] - 4.0).abs() < 1e-12 && (ev[2] - 6.0).abs() < 1e-12);
    }

    #[test]
    fn schur_rejects_bad_input() {
        assert!(real_schur(&DMatrix::zeros(2, 3)).is_err());
        assert!(real_schur(&DMatrix::from_element(2, 2, f64::NAN)).is_err());
    }

    #[test]
    fn dlanv2_standardizes() {
        let cases = [
            (1.0, 2.0, 3.0, 4.0),
            (0.0, -1.0, 1.0, 0.0),
            (1.0, 5.0, -2.0, 3.0),
            (2.0, 0.0, 1.0, 3.0),
            (1.0, 1e-20, -1e-20, 1.0),
        ];
        for (a0, b0, c0, d0) in cases {
            let (a, b, c, d, cs, sn) = dlanv2(a0, b0, c0, d0);
            let g = DMatrix::from_row_slice(2, 2, &[cs, -sn, sn, cs]);
            let m0 = DMatrix::from_row_slice(2, 2, &[a0, b0, c0, d0]);
            let m = DMatrix::from_row_slice(2, 2, &[a, b, c, d]);
            assert!(max_abs(&(g.transpose() * &m0 * &g - &m)) < 1e-14 * max_abs(&m0).max(1.0));
            assert!(c == 0.0 || (a == d && b * c < 0.0));
        }
    }

    #[test]
    fn ordered_schur_sorts_by_modulus() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=10 {
            for _ in 0..5 {
                let m = random_matrix(&mut rng, n);
                let s = ordered_schur(&m).unwrap();
                check_decomposition(&m, &s.u, &s.t);
                let mods: Vec<f64> = s.blocks.iter().map(|&b| block_modulus(&s.t, b)).collect();
                for w in mods.windows(2) {
                    assert!(w[0] <= w[1] + 1e-12, "{mods:?}");
                }
                let mut before: Vec<f64> = real_schur(&m).unwrap().eigenvalues().iter().map(|z| z.norm()).collect();
                let mut after: Vec<f64> = s.eigenvalues.iter().map(|z| z.norm()).collect();
                before.sort_by(|a, b| a.partial_cmp(b).unwrap());
                after.sort_by(|a, b| a.partial_cmp(b).unwrap());
                for (x, y) in before.iter().zip(&after) {
                    assert!((x - y).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn boundary_detection() {
        let m = DMatrix::from_row_slice(3, 3, &[0.1, 0.0, 0.0, 0.0, 0.0, -2.0, 0.0, 2.0, 0.0]);
        let s = ordered_schur(&m).unwrap();
        assert!(s.is_boundary(1));
        assert!(!s.is_boundary(2));
        assert!(s.is_boundary(3));
    }
}
