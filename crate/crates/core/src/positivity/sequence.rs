//! Predicates along `Z_m = G + [mD]` and the point past which they are periodic.
//!
//! A predicate that reads `Z` only through clamped linear forms `l(Z)` in
//! `[lo - 1, hi + 1]` is constant in every form with `l(D) != 0` once `m`
//! is large, and periodic in the rest. Scanning one period past that horizon
//! decides the predicate for all `m`.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::divisor::{RDivisor, ZDivisor};
use crate::error::Result;
use crate::exact_numbers::{lcm_all, QuadExt};
use crate::surface::{Guard, Predicate, SurfaceModel};

/// Guard applied to `Z_m = shift_divisor + [mD]`; `shift = normal . shift_divisor`.
#[derive(Clone, Debug)]
pub(crate) struct Probe {
    pub normal: Vec<i64>,
    pub lo: i64,
    pub hi: i64,
    pub shift: i64,
}

impl Probe {
    pub fn new(normal: Vec<i64>, lo: i64, hi: i64) -> Self {
        Probe { normal, lo, hi, shift: 0 }
    }

    pub fn from_guard(g: &Guard, twist: &ZDivisor) -> Self {
        Probe {
            shift: twist.dot(&g.normal),
            normal: g.normal.clone(),
            lo: g.lo,
            hi: g.hi,
        }
    }
}

/// Past `horizon` the predicate repeats with `period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub horizon: u64,
    pub period: u64,
}

fn to_u64(v: &BigInt) -> Option<u64> {
    if v.is_negative() {
        Some(0)
    } else {
        v.to_u64()
    }
}

/// `None` when no finite horizon below `cap` can be certified.
pub(crate) fn window(coords: &[QuadExt], probes: &[Probe], cap: u64) -> Result<Option<Window>> {
    let dens: Vec<BigInt> = coords.iter().filter_map(|c| c.denominator()).collect();
    let Some(period) = to_u64(&lcm_all(dens.iter())).filter(|&p| p <= cap) else {
        return Ok(None);
    };
    let mut horizon = 0u64;
    for p in probes {
        let mut l = QuadExt::zero();
        let (mut lo_frac, mut hi_frac) = (0i64, 0i64);
        let mut irrational_support = false;
        for (n, d) in p.normal.iter().zip(coords) {
            if *n == 0 {
                continue;
            }
            l = l.try_add(&d.scale_int(*n))?;
            if !d.is_integer() {
                lo_frac += (*n).min(0);
                hi_frac += (*n).max(0);
                irrational_support |= !d.is_rational();
            }
        }
        if l.is_zero() {
            if irrational_support {
                return Ok(None);
            }
            continue;
        }
        // l([mD]) lies in [m l(D) - hi_frac, m l(D) - lo_frac].
        let bound = if l.is_positive() {
            p.hi + 1 + hi_frac - p.shift
        } else {
            p.lo - 1 + lo_frac - p.shift
        };
        let h = QuadExt::from_int(bound).try_div(&l)?.ceil();
        match to_u64(&h) {
            Some(h) if h <= cap => horizon = horizon.max(h),
            _ => return Ok(None),
        }
    }
    Ok(Some(Window { horizon, period }))
}

/// Exact summary of a predicate over all `m >= 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExactRun {
    pub horizon: u64,
    pub period: u64,
    /// Least `m0` with the predicate true for every `m >= m0`.
    pub from: Option<u64>,
    /// Least `m >= 1` with the predicate true.
    pub first: Option<u64>,
}

/// Predicate values on `0..len`; `len` covers both `[0, m_max]` and one period past the horizon.
#[derive(Clone, Debug)]
pub(crate) struct Series {
    pub values: Vec<bool>,
    pub window: Option<Window>,
    pub m_max: u64,
}

impl Series {
    /// Least `m0 <= m_max` with the predicate on all of `[m0, m_max]`.
    pub fn scan_from(&self) -> Option<u64> {
        stable_from(&self.values[..=self.m_max as usize])
    }

    /// Least `1 <= m <= m_max` with the predicate.
    pub fn scan_first(&self) -> Option<u64> {
        first_positive(&self.values[..=self.m_max as usize])
    }

    pub fn exact(&self) -> Option<ExactRun> {
        let w = self.window?;
        let end = (w.horizon + w.period) as usize;
        let eventually = self.values[w.horizon as usize..end].iter().all(|&v| v);
        Some(ExactRun {
            horizon: w.horizon,
            period: w.period,
            from: if eventually { stable_from(&self.values[..end]) } else { None },
            first: first_positive(&self.values[..end]),
        })
    }
}

fn first_positive(values: &[bool]) -> Option<u64> {
    values.iter().skip(1).position(|&v| v).map(|i| i as u64 + 1)
}

fn stable_from(values: &[bool]) -> Option<u64> {
    match values.iter().rposition(|&v| !v) {
        None => Some(0),
        Some(i) if i + 1 < values.len() => Some(i as u64 + 1),
        Some(_) => None,
    }
}

/// A divisor's multiples together with the surface they live on.
pub(crate) struct Context<'a> {
    pub s: &'a SurfaceModel,
    pub coords: Vec<QuadExt>,
    pub m_max: u64,
    pub cap: u64,
    cache: RefCell<Vec<ZDivisor>>,
}

impl<'a> Context<'a> {
    pub fn new(s: &'a SurfaceModel, d: &RDivisor, m_max: u64, cap: u64) -> Result<Self> {
        Ok(Self::from_coords(s, d.coords(s)?, m_max, cap))
    }

    pub fn from_coords(s: &'a SurfaceModel, coords: Vec<QuadExt>, m_max: u64, cap: u64) -> Self {
        Context {
            s,
            coords,
            m_max,
            cap,
            cache: RefCell::new(Vec::new()),
        }
    }

    /// `[mD]`.
    pub fn floor_at(&self, m: u64) -> ZDivisor {
        let mut cache = self.cache.borrow_mut();
        while cache.len() as u64 <= m {
            let k = cache.len() as i64;
            cache.push(RDivisor::round_multiple(&self.coords, k));
        }
        cache[m as usize].clone()
    }

    /// Evaluates `f([mD])`; `probes = None` means no horizon is known.
    pub fn series(&self, probes: Option<&[Probe]>, f: impl Fn(&ZDivisor) -> Result<bool>) -> Result<Series> {
        let window = match probes {
            Some(p) => window(&self.coords, p, self.cap)?,
            None => None,
        };
        let len = match window {
            Some(w) => (self.m_max + 1).max(w.horizon + w.period),
            None => self.m_max + 1,
        };
        let values = (0..len).map(|m| f(&self.floor_at(m))).collect::<Result<Vec<_>>>()?;
        Ok(Series {
            values,
            window,
            m_max: self.m_max,
        })
    }

    fn oracle_probes(&self, pred: Predicate, twist: &ZDivisor) -> Option<Vec<Probe>> {
        self.s
            .guards(pred)
            .map(|gs| gs.iter().map(|g| Probe::from_guard(g, twist)).collect())
    }

    /// `pred(G + [mD])`.
    pub fn oracle(&self, pred: Predicate, twist: &ZDivisor) -> Result<Series> {
        let probes = self.oracle_probes(pred, twist);
        self.series(probes.as_deref(), |z| self.s.evaluate(pred, &(twist + z)))
    }

    /// `[mD]` in the interior of the effective cone.
    pub fn big_integral(&self, facets: &[Vec<i64>]) -> Result<Series> {
        let probes: Vec<Probe> = facets.iter().map(|n| Probe::new(n.clone(), 0, 1)).collect();
        self.series(Some(&probes), |z| Ok(!facets.is_empty() && facets.iter().all(|n| z.dot(n) >= 1)))
    }

    /// `[mD] . C >= 1`.
    pub fn curve_degree_positive(&self, curve: &[i64]) -> Result<Series> {
        let row = self.s.pairing_row(curve);
        let probes = [Probe::new(row.clone(), 0, 1)];
        self.series(Some(&probes), |z| Ok(z.dot(&row) >= 1))
    }

    /// `h0(G + [mD]) > 0`.
    pub fn effective(&self, twist: &ZDivisor) -> Result<Series> {
        self.oracle(Predicate::Effective, twist)
    }

    /// `h0([mD]) > 0` and `[mD] != 0`.
    pub fn nonzero_section(&self) -> Result<Series> {
        let zero = ZDivisor::zero(self.s.rank());
        let probes = self.oracle_probes(Predicate::Effective, &zero).map(|mut p| {
            p.extend((0..self.s.rank()).map(|k| Probe::new(ZDivisor::unit(self.s.rank(), k).coords().to_vec(), -1, 1)));
            p
        });
        self.series(probes.as_deref(), |z| Ok(!z.is_zero() && self.s.h0(z)? > 0))
    }

    /// `(Kodaira, N -> H)` series for `N(m) = h0([mD]) > 0` and `H(m) = h0([mD] - F) > 0`.
    pub fn kodaira(&self, f: &ZDivisor) -> Result<(Series, Series)> {
        let zero = ZDivisor::zero(self.s.rank());
        let neg_f = -f;
        let probes = match (
            self.oracle_probes(Predicate::Effective, &zero),
            self.oracle_probes(Predicate::Effective, &neg_f),
        ) {
            (Some(mut a), Some(b)) => {
                a.extend(b);
                Some(a)
            }
            _ => None,
        };
        let both = self.series(probes.as_deref(), |z| Ok(self.s.h0(z)? > 0 && self.s.h0(&(z - f))? > 0))?;
        let implies = self.series(probes.as_deref(), |z| Ok(self.s.h0(z)? == 0 || self.s.h0(&(z - f))? > 0))?;
        Ok((both, implies))
    }
}

/// Least `m` with `both(m)` and `implies` true on every later index of `0..end`.
pub(crate) fn kodaira_least(both: &[bool], implies: &[bool]) -> Option<u64> {
    let mut ok_after = true;
    let mut best = None;
    for m in (0..both.len()).rev() {
        ok_after &= implies[m];
        if !ok_after {
            break;
        }
        if both[m] {
            best = Some(m as u64);
        }
    }
    best
}

/// Exact Kodaira index from the two series, when both carry a window.
pub(crate) fn kodaira_exact(both: &Series, implies: &Series) -> Option<ExactRun> {
    let w = both.window?;
    let end = (w.horizon + w.period) as usize;
    let eventually = implies.values[w.horizon as usize..end].iter().all(|&v| v);
    let from = if eventually {
        kodaira_least(&both.values[..end], &implies.values[..end])
    } else {
        None
    };
    Some(ExactRun {
        horizon: w.horizon,
        period: w.period,
        from,
        first: first_positive(&both.values[..end]),
    })
}
