//! Stokes combinatorics for rank-2 irregular data on a chart: anti-Stokes
//! directions with their roots, half-periods, sectors, Stokes-factor shapes
//! and the formal monodromy, all driven by the diagonal polar parts at each
//! pole. Angles are kept as exact rational multiples of pi whenever the
//! leading coefficient allows it.

use crate::error::{Error, Result};
use crate::exact::{CMatrix, ExactComplex, Rational};
use crate::exec;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::PI;
use std::fmt;

/// One pole of the connection form: location, pole order, and the diagonal
/// polar coefficients ordered leading-first (T_order down to T_1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pole {
    pub location: ExactComplex,
    pub order: usize,
    pub polar_matrices: Vec<CMatrix>,
}

/// The polar data of a connection; `global` declares there are no further
/// poles, which forces the residue sum condition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolarData {
    pub poles: Vec<Pole>,
    #[serde(default)]
    pub global: bool,
}

impl PolarData {
    pub fn new(poles: Vec<Pole>, global: bool) -> Result<Self> {
        let data = PolarData { poles, global };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.poles.is_empty() {
            return Err(Error::domain("polar data needs at least one pole"));
        }
        for (i, pole) in self.poles.iter().enumerate() {
            if pole.order == 0 {
                return Err(Error::domain(format!("pole {i} must have positive order")));
            }
            if pole.polar_matrices.len() != pole.order {
                return Err(Error::structure(format!(
                    "pole {i} of order {} needs {} polar matrices, got {}",
                    pole.order,
                    pole.order,
                    pole.polar_matrices.len()
                )));
            }
            for (j, t) in pole.polar_matrices.iter().enumerate() {
                if t.nrows() != 2 || t.ncols() != 2 {
                    return Err(Error::structure(format!(
                        "polar matrix {j} of pole {i} must be 2x2"
                    )));
                }
                if !t.get(0, 1).is_zero() || !t.get(1, 0).is_zero() {
                    return Err(Error::structure(format!(
                        "polar matrix {j} of pole {i} must be diagonal"
                    )));
                }
            }
            let lead = &pole.polar_matrices[0];
            if lead.get(0, 0) == lead.get(1, 1) {
                return Err(Error::structure(format!(
                    "leading polar matrix of pole {i} must have distinct diagonal entries"
                )));
            }
        }
        for i in 0..self.poles.len() {
            for j in 0..i {
                if self.poles[i].location == self.poles[j].location {
                    return Err(Error::domain(format!(
                        "pole locations must be distinct, {} repeats",
                        self.poles[i].location
                    )));
                }
            }
        }
        if self.global {
            let mut sum = CMatrix::zeros(2, 2);
            for pole in &self.poles {
                sum = &sum + pole.polar_matrices.last().unwrap();
            }
            if !sum.is_zero() {
                return Err(Error::structure(
                    "global data must have residue matrices summing to zero",
                ));
            }
        }
        Ok(())
    }

    fn pole(&self, index: usize) -> Result<&Pole> {
        self.poles
            .get(index)
            .ok_or_else(|| Error::domain(format!("no pole with index {index}")))
    }
}

/// Leading coefficient of the difference of the two exponential factors and
/// the exponent it sits over: `a/z^k` with `a` the leading diagonal
/// difference and `k` the pole order minus one.
pub fn leading_difference(p: &PolarData, pole_index: usize) -> Result<(ExactComplex, usize)> {
    let pole = p.pole(pole_index)?;
    let lead = &pole.polar_matrices[0];
    let a = lead.get(0, 0) - lead.get(1, 1);
    if a.is_zero() {
        return Err(Error::structure(
            "leading polar term has equal diagonal entries (degenerate)",
        ));
    }
    Ok((a, pole.order - 1))
}

/// An angle in [0, 2 pi): an exact rational multiple of pi when available,
/// otherwise a float in radians.
#[derive(Clone, Debug, PartialEq)]
pub enum Angle {
    PiRational(Rational),
    Radians(f64),
}

impl Angle {
    pub fn radians(&self) -> f64 {
        match self {
            Angle::PiRational(r) => r.to_f64().unwrap_or(f64::NAN) * PI,
            Angle::Radians(x) => *x,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Angle::PiRational(_))
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Angle::PiRational(r) => {
                let mut map = serializer.serialize_map(Some(3))?;
                map.serialize_entry("num", &r.numer().to_i64().ok_or_else(|| {
                    serde::ser::Error::custom("angle numerator out of range")
                })?)?;
                map.serialize_entry("den", &r.denom().to_i64().ok_or_else(|| {
                    serde::ser::Error::custom("angle denominator out of range")
                })?)?;
                map.serialize_entry("pi", &true)?;
                map.end()
            }
            Angle::Radians(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Angle;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a float or a {num, den, pi} map")
            }
            fn visit_f64<E: de::Error>(self, x: f64) -> std::result::Result<Angle, E> {
                Ok(Angle::Radians(x))
            }
            fn visit_i64<E: de::Error>(self, x: i64) -> std::result::Result<Angle, E> {
                Ok(Angle::Radians(x as f64))
            }
            fn visit_u64<E: de::Error>(self, x: u64) -> std::result::Result<Angle, E> {
                Ok(Angle::Radians(x as f64))
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Angle, A::Error> {
                let mut num: Option<i64> = None;
                let mut den: Option<i64> = None;
                let mut pi = false;
                while let Some(key) = map.next_key::<String>()? {
                    match key.as_str() {
                        "num" => num = Some(map.next_value()?),
                        "den" => den = Some(map.next_value()?),
                        "pi" => pi = map.next_value()?,
                        other => return Err(de::Error::custom(format!("unknown angle key {other}"))),
                    }
                }
                if !pi {
                    return Err(de::Error::custom("angle map needs \"pi\": true"));
                }
                let num = num.ok_or_else(|| de::Error::custom("angle map needs num"))?;
                let den = den.ok_or_else(|| de::Error::custom("angle map needs den"))?;
                if den == 0 {
                    return Err(de::Error::custom("angle denominator must be nonzero"));
                }
                Ok(Angle::PiRational(Rational::new(BigInt::from(num), BigInt::from(den))))
            }
        }
        deserializer.deserialize_any(V)
    }
}

/// Which entry of the exponential difference decays along a direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Root {
    #[serde(rename = "12")]
    R12,
    #[serde(rename = "21")]
    R21,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub angle: Angle,
    pub root: Root,
}

fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn mod_two(r: &Rational) -> Rational {
    let two = rat(2, 1);
    let q = (r / &two).floor();
    r - &(q * two)
}

/// arg(a) as an exact multiple of pi in [0, 2), when a lies on an axis or a
/// diagonal; everything else falls back to floats.
fn exact_arg_over_pi(a: &ExactComplex) -> Option<Rational> {
    let re = &a.re;
    let im = &a.im;
    if im.is_zero() {
        return Some(if re.is_positive() { rat(0, 1) } else { rat(1, 1) });
    }
    if re.is_zero() {
        return Some(if im.is_positive() { rat(1, 2) } else { rat(3, 2) });
    }
    if re.abs() == im.abs() {
        return Some(match (re.is_positive(), im.is_positive()) {
            (true, true) => rat(1, 4),
            (false, true) => rat(3, 4),
            (false, false) => rat(5, 4),
            (true, false) => rat(7, 4),
        });
    }
    None
}

/// Anti-Stokes directions of a pole: the 2k directions along which one of
/// the off-diagonal exponential factors decays fastest, each tagged with its
/// root, sorted ascending in [0, 2 pi).
pub fn anti_stokes(p: &PolarData, pole_index: usize) -> Result<Vec<Direction>> {
    let (a, k) = leading_difference(p, pole_index)?;
    if k == 0 {
        return Err(Error::domain(
            "a simple pole has no irregular directions (order must be at least 2)",
        ));
    }
    let mut out = Vec::with_capacity(2 * k);
    match exact_arg_over_pi(&a) {
        Some(t) => {
            let kq = rat(k as i64, 1);
            for j in 0..k as i64 {
                // arg(a) - k theta = pi (mod 2 pi): the (12) factor decays.
                let f12 = mod_two(&((&t - &rat(1, 1) + rat(2 * j, 1)) / &kq));
                out.push(Direction { angle: Angle::PiRational(f12), root: Root::R12 });
                let f21 = mod_two(&((&t + &rat(2 * j, 1)) / &kq));
                out.push(Direction { angle: Angle::PiRational(f21), root: Root::R21 });
            }
            out.sort_by(|x, y| match (&x.angle, &y.angle) {
                (Angle::PiRational(a), Angle::PiRational(b)) => a.cmp(b),
                _ => unreachable!("exact batch"),
            });
        }
        None => {
            let af = a.to_f64();
            let mut arg = af.im.atan2(af.re);
            if arg < 0.0 {
                arg += 2.0 * PI;
            }
            let kf = k as f64;
            for j in 0..k {
                let t12 = (arg - PI + 2.0 * PI * j as f64) / kf;
                out.push(Direction {
                    angle: Angle::Radians(t12.rem_euclid(2.0 * PI)),
                    root: Root::R12,
                });
                let t21 = (arg + 2.0 * PI * j as f64) / kf;
                out.push(Direction {
                    angle: Angle::Radians(t21.rem_euclid(2.0 * PI)),
                    root: Root::R21,
                });
            }
            out.sort_by(|x, y| x.angle.radians().partial_cmp(&y.angle.radians()).unwrap());
        }
    }
    Ok(out)
}

/// A half-period: a window of consecutive anti-Stokes directions covering
/// half a turn of the leading exponential, with per-direction root counts.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfPeriod {
    pub indices: Vec<usize>,
    pub multiplicities: Vec<usize>,
    pub multiplicity_sum: usize,
}

/// All cyclic windows of length l = (direction count)/2. Each direction of a
/// rank-2 system carries exactly one root, so a window of length l has
/// multiplicity sum l; the sum is 1 exactly in the two-direction case.
pub fn half_periods(directions: &[Direction]) -> Result<Vec<HalfPeriod>> {
    let n = directions.len();
    if n == 0 || n % 2 != 0 {
        return Err(Error::internal(format!(
            "anti-Stokes direction count {n} is not a positive even number"
        )));
    }
    let l = n / 2;
    let mut out = Vec::with_capacity(n);
    for start in 0..n {
        let indices: Vec<usize> = (0..l).map(|i| (start + i) % n).collect();
        let multiplicities = vec![1; l];
        out.push(HalfPeriod { indices, multiplicities, multiplicity_sum: l });
    }
    Ok(out)
}

/// Open angular sector between consecutive anti-Stokes directions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Sector {
    pub from: usize,
    pub to: usize,
}

pub fn sectors(directions: &[Direction]) -> Vec<Sector> {
    let n = directions.len();
    (0..n).map(|i| Sector { from: i, to: (i + 1) % n }).collect()
}

/// Triangular side of the one-parameter unipotent group attached to a
/// direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorShape {
    #[serde(rename = "upper")]
    Upper,
    #[serde(rename = "lower")]
    Lower,
}

pub fn stokes_factor_shape(root: Root) -> FactorShape {
    match root {
        Root::R12 => FactorShape::Upper,
        Root::R21 => FactorShape::Lower,
    }
}

/// The concrete unipotent factor with the given off-diagonal parameter.
pub fn factor_matrix(root: Root, param: &ExactComplex) -> CMatrix {
    let mut m = CMatrix::identity(2);
    match root {
        Root::R12 => m.set(0, 1, param.clone()),
        Root::R21 => m.set(1, 0, param.clone()),
    }
    m
}

/// Diagonal of `e^{2 pi i T_1}` with an exact value whenever the exponent is
/// a real rational with quarter-integer fractional part.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormalMonodromy {
    /// Diagonal entries as [re, im] floats.
    pub diagonal: [[f64; 2]; 2],
    /// Exact matrix when both entries land on the quarter-turn lattice.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<CMatrix>,
    pub unitary: bool,
}

fn exp_two_pi_i(t: &ExactComplex) -> (f64, f64, Option<ExactComplex>) {
    // e^{2 pi i (x + iy)} = e^{-2 pi y} (cos 2 pi x + i sin 2 pi x); the
    // real part of the exponent only matters mod 1.
    let x = {
        let r = &t.re;
        r - &r.floor()
    };
    let y = &t.im;
    let scale = (-2.0 * PI * y.to_f64().unwrap_or(f64::NAN)).exp();
    let phase = 2.0 * PI * x.to_f64().unwrap_or(f64::NAN);
    let (re, im) = (scale * phase.cos(), scale * phase.sin());
    let exact = if y.is_zero() {
        let quarter = &x * &rat(4, 1);
        if quarter.is_integer() {
            match quarter.to_i64().unwrap_or(-1) {
                0 => Some(ExactComplex::one()),
                1 => Some(ExactComplex::i()),
                2 => Some(-&ExactComplex::one()),
                3 => Some(-&ExactComplex::i()),
                _ => None,
            }
        } else {
            None
        }
    } else {
        None
    };
    (re, im, exact)
}

/// Formal monodromy of a pole: the exponential of its residue term.
pub fn formal_monodromy(p: &PolarData, pole_index: usize) -> Result<FormalMonodromy> {
    let pole = p.pole(pole_index)?;
    let t1 = pole.polar_matrices.last().unwrap();
    let e1 = t1.get(0, 0);
    let e2 = t1.get(1, 1);
    let (r1, i1, x1) = exp_two_pi_i(e1);
    let (r2, i2, x2) = exp_two_pi_i(e2);
    let exact = match (x1, x2) {
        (Some(a), Some(b)) => {
            let mut m = CMatrix::zeros(2, 2);
            m.set(0, 0, a);
            m.set(1, 1, b);
            Some(m)
        }
        _ => None,
    };
    Ok(FormalMonodromy {
        diagonal: [[r1, i1], [r2, i2]],
        exact,
        unitary: e1.im.is_zero() && e2.im.is_zero(),
    })
}

/// Everything the combinatorics yields for one pole.
#[derive(Clone, Debug, Serialize)]
pub struct PoleReport {
    pub pole_index: usize,
    pub k: usize,
    pub angles_exact: bool,
    pub directions: Vec<Direction>,
    pub half_periods: Vec<HalfPeriod>,
    pub sectors: Vec<Sector>,
    pub factor_shapes: Vec<FactorShape>,
    pub formal_monodromy: FormalMonodromy,
}

#[derive(Clone, Debug, Serialize)]
pub struct StokesReport {
    pub poles: Vec<PoleReport>,
}

/// Per-pole reports assembled in pole order; the per-pole work runs through
/// the configured execution strategy.
pub fn stokes_report(p: &PolarData) -> Result<StokesReport> {
    stokes_report_impl(p, true)
}

/// Always-sequential variant, for benchmarking against the parallel path.
pub fn stokes_report_seq(p: &PolarData) -> Result<StokesReport> {
    stokes_report_impl(p, false)
}

fn stokes_report_impl(p: &PolarData, parallel: bool) -> Result<StokesReport> {
    p.validate()?;
    let one = |i: &usize| -> Result<PoleReport> {
        let i = *i;
        let (_, k) = leading_difference(p, i)?;
        let directions = anti_stokes(p, i)?;
        let half_periods = half_periods(&directions)?;
        let secs = sectors(&directions);
        let factor_shapes = directions.iter().map(|d| stokes_factor_shape(d.root)).collect();
        let formal = formal_monodromy(p, i)?;
        Ok(PoleReport {
            pole_index: i,
            k,
            angles_exact: directions.iter().all(|d| d.angle.is_exact()),
            directions,
            half_periods,
            sectors: secs,
            factor_shapes,
            formal_monodromy: formal,
        })
    };
    let idx: Vec<usize> = (0..p.poles.len()).collect();
    let results = if parallel {
        exec::map_slice(&idx, one)
    } else {
        exec::map_slice_seq(&idx, one)
    };
    let mut poles = Vec::with_capacity(results.len());
    for r in results {
        poles.push(r?);
    }
    Ok(StokesReport { poles })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn diag(a: ExactComplex, b: ExactComplex) -> CMatrix {
        let mut m = CMatrix::zeros(2, 2);
        m.set(0, 0, a);
        m.set(1, 1, b);
        m
    }

    fn diag_int(a: i64, b: i64) -> CMatrix {
        diag(ExactComplex::from_int(a), ExactComplex::from_int(b))
    }

    fn single_pole(order: usize, lead: CMatrix) -> PolarData {
        let mut mats = vec![lead];
        while mats.len() < order {
            mats.push(CMatrix::zeros(2, 2));
        }
        PolarData::new(
            vec![Pole { location: ExactComplex::zero(), order, polar_matrices: mats }],
            false,
        )
        .unwrap()
    }

    fn frac(d: &Direction) -> Rational {
        match &d.angle {
            Angle::PiRational(r) => r.clone(),
            Angle::Radians(x) => panic!("expected exact angle, got {x}"),
        }
    }

    #[test]
    fn leading_difference_convention() {
        let p = single_pole(2, diag_int(1, 0));
        let (a, k) = leading_difference(&p, 0).unwrap();
        assert_eq!(a, ExactComplex::one());
        assert_eq!(k, 1);

        let p4 = single_pole(4, diag_int(3, 1));
        let (a4, k4) = leading_difference(&p4, 0).unwrap();
        assert_eq!(a4, ExactComplex::from_int(2));
        assert_eq!(k4, 3);

        // Equal leading entries bypass the constructor but trip the check.
        let degenerate = PolarData {
            poles: vec![Pole {
                location: ExactComplex::zero(),
                order: 2,
                polar_matrices: vec![diag_int(5, 5), CMatrix::zeros(2, 2)],
            }],
            global: false,
        };
        assert!(matches!(leading_difference(&degenerate, 0), Err(Error::Structure(_))));
        assert!(PolarData::new(degenerate.poles.clone(), false).is_err());
    }

    #[test]
    fn two_directions_for_double_pole() {
        let p = single_pole(2, diag_int(1, 0));
        let dirs = anti_stokes(&p, 0).unwrap();
        assert_eq!(dirs.len(), 2);
        assert_eq!(dirs[0].root, Root::R21);
        assert_eq!(frac(&dirs[0]), rat(0, 1));
        assert_eq!(dirs[1].root, Root::R12);
        assert_eq!(frac(&dirs[1]), rat(1, 1));
    }

    #[test]
    fn six_directions_for_order_four_pole() {
        let p = single_pole(4, diag_int(1, 0));
        let dirs = anti_stokes(&p, 0).unwrap();
        assert_eq!(dirs.len(), 6);
        let fracs: Vec<Rational> = dirs.iter().map(frac).collect();
        let expect = [rat(0, 1), rat(1, 3), rat(2, 3), rat(1, 1), rat(4, 3), rat(5, 3)];
        assert_eq!(fracs, expect);
        let roots: Vec<Root> = dirs.iter().map(|d| d.root).collect();
        assert_eq!(
            roots,
            [Root::R21, Root::R12, Root::R21, Root::R12, Root::R21, Root::R12]
        );
    }

    #[test]
    fn imaginary_coefficient_shifts_directions() {
        let p = single_pole(2, diag(ExactComplex::i(), ExactComplex::zero()));
        let dirs = anti_stokes(&p, 0).unwrap();
        assert_eq!(frac(&dirs[0]), rat(1, 2));
        assert_eq!(dirs[0].root, Root::R21);
        assert_eq!(frac(&dirs[1]), rat(3, 2));
        assert_eq!(dirs[1].root, Root::R12);
    }

    #[test]
    fn roots_interleave() {
        for lead in [diag_int(1, 0), diag_int(-2, 1), diag(ExactComplex::i(), ExactComplex::zero())]
        {
            for order in [2usize, 3, 5] {
                let p = single_pole(order, lead.clone());
                let dirs = anti_stokes(&p, 0).unwrap();
                assert_eq!(dirs.len(), 2 * (order - 1));
                for w in dirs.windows(2) {
                    assert_ne!(w[0].root, w[1].root, "roots must alternate");
                }
            }
        }
    }

    #[test]
    fn membership_oracle_on_float_fallback() {
        // arg(a) not a rational multiple of pi: floats, flagged inexact.
        let a = ExactComplex::from_parts(3, 10, 7, 10);
        let p = single_pole(3, diag(a.clone(), ExactComplex::zero()));
        let dirs = anti_stokes(&p, 0).unwrap();
        assert!(dirs.iter().all(|d| !d.angle.is_exact()));
        let af = a.to_f64();
        let k = 2.0;
        for d in &dirs {
            let w = af * Complex64::from_polar(1.0, -k * d.angle.radians());
            assert!(w.im.abs() <= 1e-10 * w.norm(), "direction must be real: {w}");
            match d.root {
                Root::R12 => assert!(w.re < 0.0),
                Root::R21 => assert!(w.re > 0.0),
            }
        }
        // Strictly between directions the factor is genuinely complex.
        for pair in dirs.windows(2) {
            let mid = 0.5 * (pair[0].angle.radians() + pair[1].angle.radians());
            let w = af * Complex64::from_polar(1.0, -k * mid);
            assert!(w.im.abs() > 1e-10 * w.norm());
        }
    }

    #[test]
    fn half_period_windows() {
        let p = single_pole(2, diag_int(1, 0));
        let dirs = anti_stokes(&p, 0).unwrap();
        let hp = half_periods(&dirs).unwrap();
        assert_eq!(hp.len(), 2);
        for h in &hp {
            assert_eq!(h.indices.len(), 1);
            assert_eq!(h.multiplicity_sum, 1);
        }

        let p4 = single_pole(4, diag_int(1, 0));
        let dirs4 = anti_stokes(&p4, 0).unwrap();
        let hp4 = half_periods(&dirs4).unwrap();
        assert_eq!(hp4.len(), 6);
        for h in &hp4 {
            assert_eq!(h.indices.len(), 3);
            assert_eq!(h.multiplicity_sum, 3);
            // Root types alternate inside each window.
            let roots: Vec<Root> = h.indices.iter().map(|&i| dirs4[i].root).collect();
            assert_ne!(roots[0], roots[1]);
            assert_ne!(roots[1], roots[2]);
        }
        assert!(half_periods(&dirs4[..3]).is_err());
    }

    #[test]
    fn factor_shapes_and_matrices() {
        assert_eq!(stokes_factor_shape(Root::R12), FactorShape::Upper);
        assert_eq!(stokes_factor_shape(Root::R21), FactorShape::Lower);
        let up = factor_matrix(Root::R12, &ExactComplex::from_int(5));
        assert_eq!(up, CMatrix::from_ints(&[&[1, 5], &[0, 1]]));
        let low = factor_matrix(Root::R21, &ExactComplex::from_int(5));
        assert_eq!(low, CMatrix::from_ints(&[&[1, 0], &[5, 1]]));
        assert_eq!(factor_matrix(Root::R12, &ExactComplex::zero()), CMatrix::identity(2));
    }

    #[test]
    fn formal_monodromy_quarter_lattice() {
        let p = single_pole(2, diag_int(1, 0));
        // T_1 defaults to zero in the helper: identity monodromy.
        let m = formal_monodromy(&p, 0).unwrap();
        assert_eq!(m.exact, Some(CMatrix::identity(2)));
        assert!(m.unitary);

        let half = PolarData::new(
            vec![Pole {
                location: ExactComplex::zero(),
                order: 2,
                polar_matrices: vec![
                    diag_int(1, 0),
                    diag(ExactComplex::from_ratio(1, 2), ExactComplex::from_ratio(-1, 2)),
                ],
            }],
            false,
        )
        .unwrap();
        let m = formal_monodromy(&half, 0).unwrap();
        assert_eq!(m.exact, Some(CMatrix::from_ints(&[&[-1, 0], &[0, -1]])));

        let quarter = PolarData::new(
            vec![Pole {
                location: ExactComplex::zero(),
                order: 2,
                polar_matrices: vec![
                    diag_int(1, 0),
                    diag(ExactComplex::from_ratio(1, 4), ExactComplex::from_ratio(-1, 4)),
                ],
            }],
            false,
        )
        .unwrap();
        let m = formal_monodromy(&quarter, 0).unwrap();
        let expect = diag(ExactComplex::i(), -&ExactComplex::i());
        assert_eq!(m.exact, Some(expect));
    }

    #[test]
    fn formal_monodromy_periodicity_and_unitarity() {
        let base = diag(ExactComplex::from_ratio(1, 4), ExactComplex::from_ratio(-1, 4));
        let shifted = diag(
            ExactComplex::from_ratio(13, 4),
            ExactComplex::from_ratio(-9, 4),
        );
        let make = |t1: CMatrix| {
            PolarData::new(
                vec![Pole {
                    location: ExactComplex::zero(),
                    order: 2,
                    polar_matrices: vec![diag_int(1, 0), t1],
                }],
                false,
            )
            .unwrap()
        };
        let a = formal_monodromy(&make(base), 0).unwrap();
        let b = formal_monodromy(&make(shifted), 0).unwrap();
        assert_eq!(a, b);

        // Imaginary exponents scale the modulus: not unitary, no exact form.
        let imag = diag(ExactComplex::i(), ExactComplex::zero());
        let m = formal_monodromy(&make(imag), 0).unwrap();
        assert!(!m.unitary);
        assert!(m.exact.is_none());
        assert!((m.diagonal[0][0] - (-2.0 * PI).exp()).abs() < 1e-12);
        assert!((m.diagonal[1][0] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn global_residue_sum() {
        let p1 = Pole {
            location: ExactComplex::zero(),
            order: 2,
            polar_matrices: vec![diag_int(1, 0), diag_int(1, 2)],
        };
        let p2 = Pole {
            location: ExactComplex::one(),
            order: 2,
            polar_matrices: vec![diag_int(2, -1), diag_int(-1, -2)],
        };
        assert!(PolarData::new(vec![p1.clone(), p2.clone()], true).is_ok());
        let p2_bad = Pole {
            location: ExactComplex::one(),
            order: 2,
            polar_matrices: vec![diag_int(2, -1), diag_int(-1, 0)],
        };
        assert!(PolarData::new(vec![p1, p2_bad], true).is_err());
    }

    #[test]
    fn report_assembles_per_pole() {
        let p = PolarData::new(
            vec![
                Pole {
                    location: ExactComplex::zero(),
                    order: 2,
                    polar_matrices: vec![diag_int(1, 0), CMatrix::zeros(2, 2)],
                },
                Pole {
                    location: ExactComplex::one(),
                    order: 4,
                    polar_matrices: vec![
                        diag_int(0, 1),
                        CMatrix::zeros(2, 2),
                        CMatrix::zeros(2, 2),
                        CMatrix::zeros(2, 2),
                    ],
                },
            ],
            false,
        )
        .unwrap();
        let rep = stokes_report(&p).unwrap();
        assert_eq!(rep.poles.len(), 2);
        assert_eq!(rep.poles[0].pole_index, 0);
        assert_eq!(rep.poles[0].directions.len(), 2);
        assert_eq!(rep.poles[1].directions.len(), 6);
        assert_eq!(rep.poles[1].sectors.len(), 6);
        assert_eq!(rep.poles[1].factor_shapes.len(), 6);
        let seq = stokes_report_seq(&p).unwrap();
        assert_eq!(rep.poles.len(), seq.poles.len());
        assert_eq!(rep.poles[1].directions, seq.poles[1].directions);
    }

    #[test]
    fn angle_wire_format() {
        let exact = Angle::PiRational(rat(1, 3));
        let v = serde_json::to_value(&exact).unwrap();
        assert_eq!(v, serde_json::json!({"num": 1, "den": 3, "pi": true}));
        let back: Angle = serde_json::from_value(v).unwrap();
        assert_eq!(back, exact);

        let float = Angle::Radians(1.25);
        let v = serde_json::to_value(&float).unwrap();
        assert_eq!(v, serde_json::json!(1.25));
        let back: Angle = serde_json::from_value(v).unwrap();
        assert_eq!(back, float);
    }
}
