//! Riemann integration over infinitely fine extended partitions, sampled as
//! uniform dyadic refinements under several tag schemes.
//!
//! The integral holds when the tagged sums of every scheme settle on the
//! same real. Only uniform partitions are sampled, so a `Holds` verdict says
//! nothing about non-uniform ones.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::decay_verdict;
use crate::error::{Error, Result};
use crate::magnitude::negligible;
use crate::realfun::{diff_expr, eval_real, Expr, Func};
use crate::settings::Settings;
use crate::verdict::{Decision, Verdict};
use crate::vnum::{PointFault, SequenceGen, VirtualNumber};

/// Cells at the coarsest level.
pub const BASE_CELLS: usize = 8;
/// Refinement levels `n = 8·2^k`, k = 0..LEVELS.
pub const LEVELS: u32 = 11;
/// Left/Right tags sit this fraction of a cell inside the cell.
pub const TAG_INSET: f64 = 1e-3;
/// Cells used for the small quadratures behind `ds`.
const ELEMENT_CELLS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum TagScheme {
    Left,
    Right,
    Midpoint,
    SeededRandom(u64),
}

impl TagScheme {
    pub fn all(seed: u64) -> [TagScheme; 4] {
        [
            TagScheme::Left,
            TagScheme::Right,
            TagScheme::Midpoint,
            TagScheme::SeededRandom(seed),
        ]
    }

    pub fn name(&self) -> String {
        match self {
            TagScheme::Left => "left".into(),
            TagScheme::Right => "right".into(),
            TagScheme::Midpoint => "midpoint".into(),
            TagScheme::SeededRandom(s) => format!("random({s})"),
        }
    }
}

/// `x_0 < z_1 < x_1 < … < z_n < x_n` over `[min(a,b), max(a,b)]`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtendedPartition {
    pub a: f64,
    pub b: f64,
    pub points: Vec<f64>,
    pub tags: Vec<f64>,
    pub norm: f64,
}

pub fn make_partition(a: f64, b: f64, n: usize, scheme: TagScheme) -> Result<ExtendedPartition> {
    if n == 0 {
        return Err(Error::InvalidArgument("a partition needs at least one cell".into()));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument("endpoints must be finite".into()));
    }
    if a == b {
        return Err(Error::DegenerateInterval);
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let w = (hi - lo) / n as f64;
    let mut points: Vec<f64> = (0..=n).map(|i| lo + i as f64 * w).collect();
    points[n] = hi;
    let mut rng = match scheme {
        TagScheme::SeededRandom(s) => Some(ChaCha8Rng::seed_from_u64(s ^ (n as u64).rotate_left(32))),
        _ => None,
    };
    let mut u_prev = 0.5;
    let tags = (0..n)
        .map(|i| {
            let u = match scheme {
                TagScheme::Left => TAG_INSET,
                TagScheme::Right => 1.0 - TAG_INSET,
                TagScheme::Midpoint => 0.5,
                // antithetic pairs (u, 1-u) on neighbouring cells
                TagScheme::SeededRandom(_) => {
                    if i % 2 == 0 {
                        let r: f64 = rng.as_mut().expect("seeded").gen();
                        u_prev = TAG_INSET + (1.0 - 2.0 * TAG_INSET) * r;
                        u_prev
                    } else {
                        1.0 - u_prev
                    }
                }
            };
            points[i] + u * (points[i + 1] - points[i])
        })
        .collect();
    Ok(ExtendedPartition {
        a,
        b,
        points,
        tags,
        norm: w,
    })
}

/// Neumaier-compensated running sum.
#[derive(Default)]
struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// `Σ f(z_i)(x_i − x_{i−1})`, summed left to right.
pub fn riemann_sum(f: &Expr, p: &ExtendedPartition) -> Result<f64> {
    let mut acc = Compensated::default();
    for (i, z) in p.tags.iter().enumerate() {
        acc.add(eval_real(f, *z)? * (p.points[i + 1] - p.points[i]));
    }
    Ok(acc.value())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SchemeTail {
    pub scheme: String,
    /// Extrapolated sums at the six finest levels.
    pub tail: Vec<f64>,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegralReport {
    pub value: Option<f64>,
    pub verdict: Verdict,
    pub per_scheme: Vec<SchemeTail>,
    /// Cells at the finest level.
    pub depth: u64,
    /// Largest cross-scheme disagreement at the finest level.
    pub spread: f64,
}

fn level_cells(k: u32) -> usize {
    BASE_CELLS << k
}

fn extrapolate(scheme: TagScheme, fine: f64, coarse: f64) -> f64 {
    match scheme {
        TagScheme::Left | TagScheme::Right => 2.0 * fine - coarse,
        TagScheme::Midpoint => (4.0 * fine - coarse) / 3.0,
        TagScheme::SeededRandom(_) => fine,
    }
}

fn scheme_sums(f: &Expr, lo: f64, hi: f64, scheme: TagScheme) -> Result<Vec<f64>> {
    let raw = (0..LEVELS)
        .map(|k| riemann_sum(f, &make_partition(lo, hi, level_cells(k), scheme)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(raw.windows(2).map(|w| extrapolate(scheme, w[1], w[0])).collect())
}

/// Integral of `f` from `a` to `b`; `b < a` negates, `a = b` gives zero.
pub fn integrate(f: &Expr, a: f64, b: f64, settings: &Settings) -> Result<IntegralReport> {
    let schemes = TagScheme::all(settings.seed);
    if a == b {
        return Ok(IntegralReport {
            value: Some(0.0),
            verdict: Verdict::Holds,
            per_scheme: schemes
                .iter()
                .map(|s| SchemeTail {
                    scheme: s.name(),
                    tail: vec![0.0],
                    verdict: Verdict::Holds,
                })
                .collect(),
            depth: 0,
            spread: 0.0,
        });
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let sign = if b < a { -1.0 } else { 1.0 };
    let sums = schemes
        .iter()
        .map(|s| scheme_sums(f, lo, hi, *s))
        .collect::<Result<Vec<_>>>()?;
    let mid = sums[2].last().copied().expect("at least two levels");
    let floor = 1e-12 * mid.abs().max(1.0);
    let levels = sums[0].len();
    let spreads: Vec<f64> = (0..levels)
        .map(|k| {
            let col = sums.iter().map(|s| s[k]);
            col.clone().fold(f64::MIN, f64::max) - col.fold(f64::MAX, f64::min)
        })
        .collect();
    let mut verdict = decay_verdict(&spreads, floor);
    let per_scheme = schemes
        .iter()
        .zip(&sums)
        .map(|(s, v)| {
            let tail = v[v.len().saturating_sub(6)..].to_vec();
            let dev: Vec<f64> = v.iter().map(|x| (x - mid).abs()).collect();
            let sv = decay_verdict(&dev, floor);
            verdict = verdict.and(sv);
            SchemeTail {
                scheme: s.name(),
                tail: tail.iter().map(|x| sign * x).collect(),
                verdict: sv,
            }
        })
        .collect();
    Ok(IntegralReport {
        value: (mid.is_finite() && !verdict.fails()).then_some(sign * mid),
        verdict,
        per_scheme,
        depth: level_cells(LEVELS - 1) as u64,
        spread: *spreads.last().expect("non-empty"),
    })
}

/// Midpoint rule with one Richardson step, for the small element integrals.
fn quad(f: &Expr, lo: f64, hi: f64) -> std::result::Result<f64, PointFault> {
    let mid = |n: usize| -> std::result::Result<f64, PointFault> {
        let w = (hi - lo) / n as f64;
        let mut acc = Compensated::default();
        for i in 0..n {
            let v = eval_real(f, lo + (i as f64 + 0.5) * w)
                .map_err(|e| PointFault::Domain(e.to_string()))?;
            acc.add(v * w);
        }
        Ok(acc.value())
    };
    let (fine, coarse) = (mid(ELEMENT_CELLS)?, mid(ELEMENT_CELLS / 2)?);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Which differential is compared against which first-order stand-in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Element {
    /// `ds = ∫ f` against `f(x)·dx`, relative to `dx`.
    Area,
    /// `dℓ = ∫ √(1+f′²)` against `dx`, relative to `dℓ`.
    NaiveLength,
    /// `ds = ∫ 2πf√(1+f′²)` against `2πf(x)·dx`, relative to `ds`.
    NaiveSurface,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FtcReport {
    pub element: Element,
    pub x: f64,
    pub verdict: Verdict,
    pub depth: u64,
    /// `|error| / reference` at the deepest sampled index.
    pub ratio: f64,
    pub integral: Option<f64>,
}

fn element_integrand(f: &Expr, element: Element) -> Result<Expr> {
    Ok(match element {
        Element::Area => f.clone(),
        Element::NaiveLength => arc_integrand(f)?,
        Element::NaiveSurface => Expr::int(2) * Expr::Pi * f.clone() * arc_integrand(f)?,
    })
}

fn arc_integrand(f: &Expr) -> Result<Expr> {
    let df = diff_expr(f)?;
    Ok(Expr::call(Func::Sqrt, Expr::int(1) + Expr::Pow(Box::new(df), 2)))
}

/// Tests whether the first-order stand-in for a differential element at `x`
/// is negligible, with `dx = 1/n` sampled on the sequence tier.
pub fn element_check(f: &Expr, x: f64, element: Element, settings: &Settings) -> Result<FtcReport> {
    let integrand = element_integrand(f, element)?;
    let fx = eval_real(f, x)?;
    let approx = match element {
        Element::Area => fx,
        Element::NaiveLength => 1.0,
        Element::NaiveSurface => 2.0 * PI * fx,
    };
    let ds = {
        let g = integrand.clone();
        SequenceGen::new(format!("int_x^(x+dx) {g}"), move |n| quad(&g, x, x + 1.0 / n as f64))
    };
    let err = {
        let ds = ds.clone();
        SequenceGen::new("ds - approx*dx", move |n| Ok(ds.raw(n)? - approx / n as f64))
    };
    let reference = match element {
        Element::Area => VirtualNumber::del(),
        _ => VirtualNumber::seq(ds),
    };
    let err = VirtualNumber::seq(err);
    let d: Decision = negligible(&err, &reference, settings)?;
    let n = d.depth.max(1);
    let ratio = (err.sample(n)? / reference.sample(n)?).abs();
    Ok(FtcReport {
        element,
        x,
        verdict: d.verdict,
        depth: d.depth,
        ratio,
        integral: None,
    })
}

/// `ds ≈ f(x)·dx` up to an error negligible against `dx`, where `ds` is the
/// increment of `t ↦ ∫_a^t f` over `[x, x+dx]`.
pub fn ftc_check(f: &Expr, a: f64, x: f64, settings: &Settings) -> Result<FtcReport> {
    let g = integrate(f, a, x, settings)?;
    let mut r = element_check(f, x, Element::Area, settings)?;
    r.integral = g.value;
    if g.verdict.fails() {
        r.verdict = Verdict::Fails;
    }
    Ok(r)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum GeomKind {
    Area,
    VolumeRevolution,
    ArcLength,
    SurfaceRevolution,
}

impl std::str::FromStr for GeomKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "area" => Ok(GeomKind::Area),
            "volume" | "volumerevolution" => Ok(GeomKind::VolumeRevolution),
            "arclength" | "length" => Ok(GeomKind::ArcLength),
            "surface" | "surfacerevolution" => Ok(GeomKind::SurfaceRevolution),
            _ => Err(Error::InvalidArgument(format!("unknown measure `{s}`"))),
        }
    }
}

/// Points where positivity of `f` is checked.
const POSITIVITY_PROBES: usize = 256;

fn require_positive(f: &Expr, a: f64, b: f64) -> Result<()> {
    let (lo, hi) = (a.min(b), a.max(b));
    for i in 0..=POSITIVITY_PROBES {
        let x = lo + (hi - lo) * i as f64 / POSITIVITY_PROBES as f64;
        let v = eval_real(f, x)?;
        if v.is_nan() || v <= 0.0 {
            return Err(Error::NotPositive { at: x, value: v });
        }
    }
    Ok(())
}

/// Area, volume of revolution, arc length and surface of revolution of the
/// graph of `f` over `[a, b]`.
pub fn geom_measure(kind: GeomKind, f: &Expr, a: f64, b: f64, settings: &Settings) -> Result<IntegralReport> {
    let integrand = match kind {
        GeomKind::Area => f.clone(),
        GeomKind::VolumeRevolution => Expr::Pi * Expr::Pow(Box::new(f.clone()), 2),
        GeomKind::ArcLength => arc_integrand(f)?,
        GeomKind::SurfaceRevolution => Expr::int(2) * Expr::Pi * f.clone() * arc_integrand(f)?,
    };
    if kind != GeomKind::ArcLength {
        require_positive(f, a, b)?;
    }
    integrate(&integrand, a, b, settings)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::realfun::parse_expr;

    fn e(src: &str) -> Expr {
        parse_expr(src).unwrap()
    }
    fn s() -> Settings {
        Settings::default()
    }

    #[test]
    fn partitions() {
        let p = make_partition(0.0, 1.0, 4, TagScheme::Midpoint).unwrap();
        assert_eq!(p.points, [0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(p.tags, [0.125, 0.375, 0.625, 0.875]);
        assert_eq!(p.norm, 0.25);
        let q = make_partition(1.0, 0.0, 4, TagScheme::Midpoint).unwrap();
        assert_eq!((q.points, q.tags), (p.points, p.tags));
        let r = make_partition(0.0, 1.0, 1, TagScheme::SeededRandom(7)).unwrap();
        assert!(r.tags[0] > 0.0 && r.tags[0] < 1.0);
        assert!(matches!(make_partition(2.0, 2.0, 3, TagScheme::Left), Err(Error::DegenerateInterval)));
        for scheme in TagScheme::all(3) {
            let p = make_partition(-1.0, 2.0, 33, scheme).unwrap();
            for (i, z) in p.tags.iter().enumerate() {
                assert!(p.points[i] < *z && *z < p.points[i + 1]);
            }
        }
    }

    #[test]
    fn sums() {
        let p = make_partition(0.0, 1.0, 4, TagScheme::Midpoint).unwrap();
        assert_eq!(riemann_sum(&e("x"), &p).unwrap(), 0.5);
        let p = make_partition(-1.0, 2.0, 7, TagScheme::SeededRandom(1)).unwrap();
        assert!((riemann_sum(&e("5"), &p).unwrap() - 15.0).abs() < 1e-13);
        // direct four-term oracle with inset left tags
        let p = make_partition(0.0, 1.0, 4, TagScheme::Left).unwrap();
        let oracle: f64 = (0..4).map(|i| (0.25 * (i as f64 + TAG_INSET)).powi(2) * 0.25).sum();
        assert!((riemann_sum(&e("x^2"), &p).unwrap() - oracle).abs() < 1e-15);
        assert!((oracle - 0.21875).abs() < 1e-3);
    }

    #[test]
    fn integrals() {
        let r = integrate(&e("x^2"), 0.0, 1.0, &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!((r.value.unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!(r.per_scheme.iter().all(|t| t.verdict.holds()));
        let r = integrate(&e("x"), 1.0, 0.0, &s()).unwrap();
        assert!((r.value.unwrap() + 0.5).abs() < 1e-12);
        let r = integrate(&e("sin(x)"), 0.3, 0.3, &s()).unwrap();
        assert_eq!((r.value, r.verdict), (Some(0.0), Verdict::Holds));
        let r = integrate(&e("exp(x)"), -1.0, 2.0, &s()).unwrap();
        assert!((r.value.unwrap() - (2f64.exp() - (-1f64).exp())).abs() < 1e-9);
    }

    #[test]
    fn ftc() {
        let r = ftc_check(&e("exp(x)"), 0.0, 0.5, &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Holds, "{r:?}");
        assert!(r.ratio <= 1e-3);
        assert!(ftc_check(&e("cos(x)"), 0.0, 1.0, &s()).unwrap().verdict.holds());
        let r = ftc_check(&e("3"), 0.0, 1.0, &s()).unwrap();
        assert!(r.verdict.holds() && r.ratio < 1e-12, "{r:?}");
    }

    #[test]
    fn geometry() {
        let r = geom_measure(GeomKind::ArcLength, &e("x"), 0.0, 1.0, &s()).unwrap();
        assert!((r.value.unwrap() - 2f64.sqrt()).abs() < 1e-9);
        let r = geom_measure(GeomKind::Area, &e("3"), 1.0, 4.0, &s()).unwrap();
        assert!((r.value.unwrap() - 9.0).abs() < 1e-12);
        let h = 1e-6;
        let r = geom_measure(GeomKind::SurfaceRevolution, &e("sqrt(1 - x^2)"), -1.0 + h, 1.0 - h, &s()).unwrap();
        assert!((r.value.unwrap() - 4.0 * PI * (1.0 - h)).abs() < 1e-4, "{r:?}");
        let r = geom_measure(GeomKind::VolumeRevolution, &e("1"), 0.0, 2.0, &s()).unwrap();
        assert!((r.value.unwrap() - 2.0 * PI).abs() < 1e-12);
        assert!(matches!(
            geom_measure(GeomKind::Area, &e("x"), -1.0, 1.0, &s()),
            Err(Error::NotPositive { .. })
        ));
        assert!(matches!(
            geom_measure(GeomKind::ArcLength, &e("abs(x)"), -1.0, 1.0, &s()),
            Err(Error::NonSmoothNode(_))
        ));
    }

    #[test]
    fn wrong_formulas_are_not_negligible() {
        let r = element_check(&e("x"), 0.5, Element::NaiveLength, &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!((r.ratio - (1.0 - 0.5f64.sqrt())).abs() < 1e-6);
        let r = element_check(&e("x + 1"), 0.5, Element::NaiveSurface, &s()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
    }
}
