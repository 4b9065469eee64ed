//! Tests that only need intersection numbers and cone generators.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::divisor::{RDivisor, ZDivisor};
use crate::error::{Error, Result};
use crate::exact_numbers::QuadExt;
use crate::surface::{CurveClass, SurfaceModel};

/// `D . C` for a coordinate vector `D` and an integral curve class.
pub fn pair_curve(s: &SurfaceModel, coords: &[QuadExt], curve: &[i64]) -> Result<QuadExt> {
    let row = s.pairing_row(curve);
    let mut acc = QuadExt::zero();
    for (c, r) in coords.iter().zip(row) {
        if r != 0 {
            acc = acc.try_add(&c.scale_int(r))?;
        }
    }
    Ok(acc)
}

/// Self-intersection or mixed intersection of coordinate vectors.
pub fn pair_coords(s: &SurfaceModel, x: &[QuadExt], y: &[QuadExt]) -> Result<QuadExt> {
    let m = s.intersection_matrix();
    let mut acc = QuadExt::zero();
    for (i, row) in m.iter().enumerate() {
        for (j, mij) in row.iter().enumerate() {
            if *mij != 0 && !x[i].is_zero() && !y[j].is_zero() {
                acc = acc.try_add(&x[i].try_mul(&y[j])?.scale_int(*mij))?;
            }
        }
    }
    Ok(acc)
}

/// `D . E` through the intersection matrix.
pub fn intersect(s: &SurfaceModel, d: &RDivisor, e: &RDivisor) -> Result<QuadExt> {
    pair_coords(s, &d.coords(s)?, &e.coords(s)?)
}

/// Verdict of a sign condition over the Mori generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConeCheck {
    pub holds: bool,
    /// First generator violating the condition.
    pub violating: Option<String>,
    pub pairings: Vec<(String, QuadExt)>,
}

fn mori_pairings(s: &SurfaceModel, coords: &[QuadExt]) -> Result<Vec<(String, QuadExt)>> {
    s.mori_generators()
        .iter()
        .map(|g| Ok((g.label.clone(), pair_curve(s, coords, &g.class_coords)?)))
        .collect()
}

fn cone_check(s: &SurfaceModel, coords: &[QuadExt], strict: bool) -> Result<ConeCheck> {
    let pairings = mori_pairings(s, coords)?;
    let violating = pairings
        .iter()
        .find(|(_, v)| if strict { !v.is_positive() } else { v.is_negative() })
        .map(|(l, _)| l.clone());
    Ok(ConeCheck {
        holds: violating.is_none(),
        violating,
        pairings,
    })
}

pub(crate) fn nef_coords(s: &SurfaceModel, coords: &[QuadExt]) -> Result<ConeCheck> {
    cone_check(s, coords, false)
}

pub(crate) fn ample_coords(s: &SurfaceModel, coords: &[QuadExt]) -> Result<ConeCheck> {
    cone_check(s, coords, true)
}

/// `D . g >= 0` for every Mori generator.
pub fn is_nef(s: &SurfaceModel, d: &RDivisor) -> Result<ConeCheck> {
    nef_coords(s, &d.coords(s)?)
}

/// `D . g > 0` for every Mori generator: ampleness on a polyhedral cone of curves.
pub fn is_ample_cone(s: &SurfaceModel, d: &RDivisor) -> Result<ConeCheck> {
    ample_coords(s, &d.coords(s)?)
}

/// `D^2 > 0` and `D . C > 0` on every generator curve.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NakaiCheck {
    pub holds: bool,
    pub self_intersection: QuadExt,
    pub curves: ConeCheck,
}

pub(crate) fn nakai_coords(s: &SurfaceModel, coords: &[QuadExt]) -> Result<NakaiCheck> {
    let self_intersection = pair_coords(s, coords, coords)?;
    let curves = ample_coords(s, coords)?;
    Ok(NakaiCheck {
        holds: self_intersection.is_positive() && curves.holds,
        self_intersection,
        curves,
    })
}

pub fn nakai_test(s: &SurfaceModel, d: &RDivisor) -> Result<bool> {
    Ok(nakai_coords(s, &d.coords(s)?)?.holds)
}

/// Minimum of `(D.C)/(H.C)` over Mori generators and the generator attaining it.
pub(crate) fn ratio_coords(s: &SurfaceModel, coords: &[QuadExt], h: &[QuadExt]) -> Result<(QuadExt, String)> {
    if !ample_coords(s, h)?.holds {
        return Err(Error::InvalidInput("reference class H is not ample".into()));
    }
    let mut best: Option<(QuadExt, String)> = None;
    for g in s.mori_generators() {
        let r = pair_curve(s, coords, &g.class_coords)?.try_div(&pair_curve(s, h, &g.class_coords)?)?;
        let better = match &best {
            None => true,
            Some((b, _)) => r.cmp_exact(b)?.is_lt(),
        };
        if better {
            best = Some((r, g.label.clone()));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("surface has no Mori generators".into()))
}

/// `min_g (D.g)/(H.g)`; positive exactly when `D` is ample.
pub fn ratio_bound(s: &SurfaceModel, d: &RDivisor, h: &RDivisor) -> Result<QuadExt> {
    Ok(ratio_coords(s, &d.coords(s)?, &h.coords(s)?)?.0)
}

pub(crate) fn seshadri_over(s: &SurfaceModel, coords: &[QuadExt], catalog: &[CurveClass]) -> Result<(QuadExt, String)> {
    let mut best: Option<(QuadExt, String)> = None;
    for c in catalog {
        let r = pair_curve(s, coords, &c.class_coords)?.scale_rational(&BigRational::new(1.into(), c.multiplicity.into()));
        let better = match &best {
            None => true,
            Some((b, _)) => r.cmp_exact(b)?.is_lt(),
        };
        if better {
            best = Some((r, c.label.clone()));
        }
    }
    best.ok_or_else(|| Error::InvalidInput("empty curve catalog".into()))
}

/// `min (D.C)/mult(C)` over the surface's curve catalog.
pub fn seshadri_bound(s: &SurfaceModel, d: &RDivisor) -> Result<QuadExt> {
    Ok(seshadri_over(s, &d.coords(s)?, s.curve_catalog())?.0)
}

/// Largest `r` with `D +- t B_k` ample for all basis vectors and `0 <= t < r`; `None` if `D` is not ample.
pub(crate) fn neighborhood_radius(s: &SurfaceModel, coords: &[QuadExt]) -> Result<Option<QuadExt>> {
    if !ample_coords(s, coords)?.holds {
        return Ok(None);
    }
    let mut best: Option<QuadExt> = None;
    for g in s.mori_generators() {
        let dg = pair_curve(s, coords, &g.class_coords)?;
        for bk in s.pairing_row(&g.class_coords) {
            if bk == 0 {
                continue;
            }
            let r = dg.scale_rational(&BigRational::new(1.into(), bk.unsigned_abs().into()));
            if best.as_ref().map_or(Ok::<bool, Error>(true), |b| Ok(r.cmp_exact(b)?.is_lt()))? {
                best = Some(r);
            }
        }
    }
    // A generator orthogonal to every basis vector would make the form degenerate.
    best.map(Some).ok_or_else(|| Error::Internal("degenerate intersection form".into()))
}

/// Result of perturbing `D` by `+- delta B_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeighborhoodCheck {
    pub holds: bool,
    /// `"+f"` or `"-C0"` style label of the first non-ample perturbation.
    pub failing: Option<String>,
    pub radius: Option<QuadExt>,
}

pub(crate) fn neighborhood_coords(s: &SurfaceModel, coords: &[QuadExt], delta: &BigRational) -> Result<NeighborhoodCheck> {
    let dq = QuadExt::rational(delta.clone());
    let mut failing = None;
    'outer: for k in 0..s.rank() {
        for sign in [1i64, -1] {
            let mut p = coords.to_vec();
            p[k] = p[k].try_add(&dq.scale_int(sign))?;
            if !ample_coords(s, &p)?.holds {
                failing = Some(format!("{}{}", if sign > 0 { "+" } else { "-" }, s.basis()[k]));
                break 'outer;
            }
        }
    }
    Ok(NeighborhoodCheck {
        holds: failing.is_none(),
        failing,
        radius: neighborhood_radius(s, coords)?,
    })
}

/// `D +- delta B` ample for every basis vector `B`.
pub fn neighborhood_test(s: &SurfaceModel, d: &RDivisor, delta: &BigRational) -> Result<bool> {
    if !num_traits::Signed::is_positive(delta) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    Ok(neighborhood_coords(s, &d.coords(s)?, delta)?.holds)
}

fn det(m: &[Vec<i64>]) -> i128 {
    // Bareiss elimination; exact on integers.
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut a: Vec<Vec<i128>> = m.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&r| a[r][k] != 0) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    sign * a[n - 1][n - 1]
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn rank_of(vectors: &[Vec<i64>], dim: usize) -> usize {
    (1..=dim.min(vectors.len()))
        .rev()
        .find(|&k| {
            subsets(vectors.len(), k).iter().any(|rows| {
                subsets(dim, k).iter().any(|cols| {
                    let minor: Vec<Vec<i64>> = rows
                        .iter()
                        .map(|&r| cols.iter().map(|&c| vectors[r][c]).collect())
                        .collect();
                    det(&minor) != 0
                })
            })
        })
        .unwrap_or(0)
}

/// Inward facet normals of the effective cone, primitive and deduplicated.
///
/// Empty when the cone is not full-dimensional (then nothing is big).
pub fn effective_facets(s: &SurfaceModel) -> Vec<Vec<i64>> {
    let rho = s.rank();
    let gens: Vec<Vec<i64>> = s.effective_generators().iter().map(|z| z.coords().to_vec()).collect();
    if rank_of(&gens, rho) < rho {
        return Vec::new();
    }
    let mut normals: Vec<Vec<i64>> = Vec::new();
    let candidates: Vec<Vec<i64>> = if rho == 1 {
        vec![vec![1]]
    } else {
        subsets(gens.len(), rho - 1)
            .into_iter()
            .filter_map(|sub| {
                let rows: Vec<&Vec<i64>> = sub.iter().map(|&i| &gens[i]).collect();
                let n: Vec<i64> = (0..rho)
                    .map(|j| {
                        let minor: Vec<Vec<i64>> = rows
                            .iter()
                            .map(|r| (0..rho).filter(|&c| c != j).map(|c| r[c]).collect())
                            .collect();
                        let d = det(&minor) as i64;
                        if j % 2 == 0 {
                            d
                        } else {
                            -d
                        }
                    })
                    .collect();
                n.iter().any(|&x| x != 0).then_some(n)
            })
            .collect()
    };
    for mut n in candidates {
        let vals: Vec<i64> = gens.iter().map(|g| g.iter().zip(&n).map(|(a, b)| a * b).sum()).collect();
        let has_pos = vals.iter().any(|&v| v > 0);
        let has_neg = vals.iter().any(|&v| v < 0);
        if has_pos && has_neg {
            continue;
        }
        if has_neg {
            n.iter_mut().for_each(|x| *x = -*x);
        }
        let g = n.iter().fold(0, |acc, &x| gcd(acc, x));
        n.iter_mut().for_each(|x| *x /= g);
        if !normals.contains(&n) {
            normals.push(n);
        }
    }
    normals
}

fn dot_q(n: &[i64], x: &[QuadExt]) -> Result<QuadExt> {
    let mut acc = QuadExt::zero();
    for (a, b) in n.iter().zip(x) {
        if *a != 0 {
            acc = acc.try_add(&b.scale_int(*a))?;
        }
    }
    Ok(acc)
}

/// Membership in the closed effective cone.
pub fn is_effective_class(s: &SurfaceModel, coords: &[QuadExt]) -> Result<bool> {
    let facets = effective_facets(s);
    if facets.is_empty() {
        return Err(Error::OracleUnavailable("effective cone is not full-dimensional".into()));
    }
    for n in &facets {
        if dot_q(n, coords)?.is_negative() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `D - eps H = sum lambda_j E_j` with `eps > 0` and `lambda_j >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigCertificate {
    pub epsilon: QuadExt,
    pub reference: ZDivisor,
    /// One coefficient per effective generator.
    pub lambda: Vec<QuadExt>,
}

impl BigCertificate {
    /// Re-checks the identity and the signs.
    pub fn verify(&self, s: &SurfaceModel, coords: &[QuadExt]) -> Result<bool> {
        if !self.epsilon.is_positive() || self.lambda.iter().any(|l| l.is_negative()) {
            return Ok(false);
        }
        if self.lambda.len() != s.effective_generators().len() {
            return Ok(false);
        }
        for (k, dk) in coords.iter().enumerate() {
            let mut rhs = self.epsilon.scale_int(self.reference.coords()[k]);
            for (l, e) in self.lambda.iter().zip(s.effective_generators()) {
                rhs = rhs.try_add(&l.scale_int(e.coords()[k]))?;
            }
            if rhs != *dk {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BigCheck {
    pub holds: bool,
    /// `min_n (n.D)/(n.H)` over facet normals; `D - t H` is effective iff `t <= eps_max`.
    pub epsilon_max: Option<QuadExt>,
    pub certificate: Option<BigCertificate>,
}

fn solve(mut a: Vec<Vec<QuadExt>>, mut b: Vec<QuadExt>) -> Result<Option<Vec<QuadExt>>> {
    let n = b.len();
    for col in 0..n {
        let Some(p) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Ok(None);
        };
        a.swap(col, p);
        b.swap(col, p);
        let inv = a[col][col].try_inv()?;
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].try_mul(&inv)?;
            let pivot = a[col].clone();
            for (x, pc) in a[r].iter_mut().zip(&pivot).skip(col) {
                *x = x.try_sub(&factor.try_mul(pc)?)?;
            }
            let t = factor.try_mul(&b[col])?;
            b[r] = b[r].try_sub(&t)?;
        }
    }
    (0..n).map(|i| b[i].try_div(&a[i][i])).collect::<Result<Vec<_>>>().map(Some)
}

pub(crate) fn big_coords(s: &SurfaceModel, coords: &[QuadExt]) -> Result<BigCheck> {
    let facets = effective_facets(s);
    if facets.is_empty() {
        return Ok(BigCheck { holds: false, epsilon_max: None, certificate: None });
    }
    let h = s.ample_reference();
    let hq: Vec<QuadExt> = h.coords().iter().map(|&c| QuadExt::from_int(c)).collect();
    let mut eps_max: Option<QuadExt> = None;
    for n in &facets {
        let nh = dot_q(n, &hq)?;
        if !nh.is_positive() {
            return Err(Error::Internal("ample reference lies outside the effective cone interior".into()));
        }
        let r = dot_q(n, coords)?.try_div(&nh)?;
        if eps_max.as_ref().map_or(Ok::<bool, Error>(true), |b| Ok(r.cmp_exact(b)?.is_lt()))? {
            eps_max = Some(r);
        }
    }
    let eps_max = eps_max.expect("at least one facet");
    if !eps_max.is_positive() {
        return Ok(BigCheck { holds: false, epsilon_max: Some(eps_max), certificate: None });
    }
    let eps = QuadExt::rational(eps_max.rational_below().expect("positive value"));
    let rest: Vec<QuadExt> = coords
        .iter()
        .zip(&hq)
        .map(|(d, h)| d.try_sub(&eps.try_mul(h)?))
        .collect::<Result<_>>()?;
    let gens = s.effective_generators();
    let rho = s.rank();
    for sub in subsets(gens.len(), rho) {
        let a: Vec<Vec<QuadExt>> = (0..rho)
            .map(|k| sub.iter().map(|&j| QuadExt::from_int(gens[j].coords()[k])).collect())
            .collect();
        if let Some(x) = solve(a, rest.clone())? {
            if x.iter().all(|l| !l.is_negative()) {
                let mut lambda = vec![QuadExt::zero(); gens.len()];
                for (v, &j) in x.into_iter().zip(&sub) {
                    lambda[j] = v;
                }
                let cert = BigCertificate { epsilon: eps, reference: h.clone(), lambda };
                if !cert.verify(s, coords)? {
                    return Err(Error::Internal("big certificate failed to verify".into()));
                }
                return Ok(BigCheck { holds: true, epsilon_max: Some(eps_max), certificate: Some(cert) });
            }
        }
    }
    Err(Error::Internal("interior class without a simplicial certificate".into()))
}

/// Interior of the effective cone, with an exact `A + N` certificate.
pub fn is_big(s: &SurfaceModel, d: &RDivisor) -> Result<BigCheck> {
    big_coords(s, &d.coords(s)?)
}
