//! Eigendecomposition of real symmetric tridiagonal matrices.
//!
//! Implicit QL iteration with Wilkinson shifts and eigenvector
//! accumulation (the classic `tql2` scheme). The two-mode Hamiltonian is
//! tridiagonal in the Fock basis, so this specialized O(m^2)-per-sweep
//! routine replaces a dense eigensolver.

#[allow(unused_imports)]
use num_traits::Float;

use alloc::{vec, vec::Vec};

use crate::{Error, Result};

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of the symmetric tridiagonal matrix with main
/// diagonal `diag` (length m) and subdiagonal `off` (length m-1).
///
/// Returns eigenvalues in ascending order and the orthonormal eigenvector
/// matrix in row-major layout: `vecs[i * m + j]` is component `i` of the
/// eigenvector belonging to eigenvalue `j`.
pub fn eigh_tridiagonal(diag: &[f64], off: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let m = diag.len();
    if m == 0 || off.len() + 1 != m {
        return Err(Error::LengthMismatch {
            expected: m.saturating_sub(1),
            got: off.len(),
        });
    }
    let mut d = diag.to_vec();
    let mut e = Vec::with_capacity(m);
    e.extend_from_slice(off);
    e.push(0.0);

    let mut z = vec![0.0f64; m * m];
    for i in 0..m {
        z[i * m + i] = 1.0;
    }

    for l in 0..m {
        let mut sweeps = 0usize;
        loop {
            // First index whose subdiagonal element is negligible.
            let mut seg = l;
            while seg < m - 1 {
                let dd = d[seg].abs() + d[seg + 1].abs();
                if e[seg].abs() <= f64::EPSILON * dd {
                    break;
                }
                seg += 1;
            }
            if seg == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_SWEEPS {
                return Err(Error::EigensolveFailed { index: l });
            }

            // Wilkinson shift from the leading 2x2 block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            let sign_r = if g >= 0.0 { r.abs() } else { -r.abs() };
            g = d[seg] - d[l] + e[l] / (g + sign_r);

            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;

            for i in (l..seg).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation annihilated the element early; deflate and
                    // restart this eigenvalue.
                    d[i + 1] -= p;
                    e[seg] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;

                for k in 0..m {
                    f = z[k * m + i + 1];
                    z[k * m + i + 1] = s * z[k * m + i] + c * f;
                    z[k * m + i] = c * z[k * m + i] - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[seg] = 0.0;
        }
    }

    // Ascending eigenvalue order, columns permuted to match.
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).unwrap_or(core::cmp::Ordering::Equal));
    let vals: Vec<f64> = order.iter().map(|&j| d[j]).collect();
    let mut vecs = vec![0.0f64; m * m];
    for (new_j, &old_j) in order.iter().enumerate() {
        for i in 0..m {
            vecs[i * m + new_j] = z[i * m + old_j];
        }
    }
    Ok((vals, vecs))
}
