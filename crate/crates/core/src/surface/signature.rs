use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Characteristic polynomial coefficients `c_0..c_n` (monic, `c_n = 1`) by Faddeev-LeVerrier.
fn char_poly(m: &[Vec<i64>]) -> Vec<BigRational> {
    let n = m.len();
    let a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect())
        .collect();
    let mut c = vec![BigRational::zero(); n + 1];
    c[n] = BigRational::from_integer(BigInt::from(1));
    let mut mk = vec![vec![BigRational::zero(); n]; n];
    for k in 1..=n {
        // M_k = A M_{k-1} + c_{n-k+1} I
        let mut next = vec![vec![BigRational::zero(); n]; n];
        for i in 0..n {
            for j in 0..n {
                let mut s = BigRational::zero();
                for l in 0..n {
                    s += &a[i][l] * &mk[l][j];
                }
                if i == j {
                    s += &c[n - k + 1];
                }
                next[i][j] = s;
            }
        }
        mk = next;
        let mut tr = BigRational::zero();
        for i in 0..n {
            for l in 0..n {
                tr += &a[i][l] * &mk[l][i];
            }
        }
        c[n - k] = -tr / BigRational::from_integer(BigInt::from(k as i64));
    }
    c
}

fn sign_changes<'a>(coeffs: impl Iterator<Item = &'a BigRational>, flip_odd: bool) -> usize {
    let mut last: Option<bool> = None;
    let mut changes = 0;
    for (k, c) in coeffs.enumerate() {
        if c.is_zero() {
            continue;
        }
        let mut pos = c.is_positive();
        if flip_odd && k % 2 == 1 {
            pos = !pos;
        }
        if let Some(prev) = last {
            if prev != pos {
                changes += 1;
            }
        }
        last = Some(pos);
    }
    changes
}

/// Eigenvalue sign counts of a symmetric integer matrix.
///
/// All roots of the characteristic polynomial are real, so Descartes' rule
/// counts them exactly.
pub(crate) fn signature(m: &[Vec<i64>]) -> (usize, usize, usize) {
    let c = char_poly(m);
    let zero = c.iter().take_while(|x| x.is_zero()).count();
    let pos = sign_changes(c.iter(), false);
    let neg = sign_changes(c.iter(), true);
    (pos, neg, zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_and_degenerate() {
        assert_eq!(signature(&[vec![2, 0, 0], vec![0, -1, 0], vec![0, 0, -3]]), (1, 2, 0));
        assert_eq!(signature(&[vec![1, 1], vec![1, 1]]), (1, 0, 1));
        assert_eq!(signature(&[vec![0, 1], vec![1, 0]]), (1, 1, 0));
    }
}
