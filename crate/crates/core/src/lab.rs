//! Empirical constants for weighted maximal inequalities, rectangle
//! Muckenhoupt-type constants, and the scalar inequalities behind the
//! exponential covering argument.
//!
//! Every ratio is `numerator / denominator` for one inequality of the form
//! `numerator <= C * denominator`; sweeping instances and tracking the largest
//! ratio estimates the constant `C` from below. Logarithms are natural.

use std::fmt;

use crate::dyadic::enumerate_shapes;
use crate::error::{invalid, Result};
use crate::grid::{box_cells, lp_norm, superlevel_measure, Grid};
use crate::maximal::{compose, compose_strong_over_cube_2d, maximal};
use crate::sat::SummedAreaTable;

/// Header of the ratio CSV format.
pub const CSV_HEADER: &str = "inequality,d,L,c,p,t,generator,seed,numerator,denominator,ratio";

/// Above this argument `phi` switches from its power series to quadrature.
pub const PHI_SERIES_LIMIT: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inequality {
    /// `w({M_c f > t})^(1/p) <= C/t ||f||_{L^p(W)}`, `W = M_c ... M_1 w`.
    WeakFs,
    /// `||M_c f||_{L^p(w)} <= C ||f||_{L^p(W)}`.
    StrongFs,
    /// `|{M_c f > t}| <= C Σ |f|/t (1 + log+ |f|/t)^(c-1)`.
    Endpoint,
    /// `w({M_2 f > t}) <= C Σ |f|/t (1 + log+ |f|/t) M_2 M_1 w` in two dimensions.
    LlogL2d,
    /// The rectangle constant `[w]_{A_p*}` (reported as a ratio over 1).
    Apstar,
    /// Exploratory: the strong bound with `W` replaced by `M_c w` alone.
    StrongFsSingleWeight,
}

impl Inequality {
    pub fn tag(self) -> &'static str {
        match self {
            Inequality::WeakFs => "weak-fs",
            Inequality::StrongFs => "strong-fs",
            Inequality::Endpoint => "endpoint",
            Inequality::LlogL2d => "llogl-2d",
            Inequality::Apstar => "apstar",
            Inequality::StrongFsSingleWeight => "strong-fs-mcw",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Self> {
        Some(match tag {
            "weak-fs" | "weak" => Inequality::WeakFs,
            "strong-fs" | "strong" => Inequality::StrongFs,
            "endpoint" => Inequality::Endpoint,
            "llogl-2d" | "llogl2d" => Inequality::LlogL2d,
            "apstar" => Inequality::Apstar,
            "strong-fs-mcw" | "strong-mcw" => Inequality::StrongFsSingleWeight,
            _ => return None,
        })
    }

    /// Whether the inequality involves a threshold `t`.
    pub fn uses_t(self) -> bool {
        matches!(self, Inequality::WeakFs | Inequality::Endpoint | Inequality::LlogL2d)
    }

    /// Whether the inequality involves an exponent `p`.
    pub fn uses_p(self) -> bool {
        matches!(
            self,
            Inequality::WeakFs | Inequality::StrongFs | Inequality::Apstar | Inequality::StrongFsSingleWeight
        )
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// One measured ratio with the instance it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub inequality: Inequality,
    pub dims: usize,
    pub level: u32,
    pub complexity: usize,
    pub p: Option<f64>,
    pub t: Option<f64>,
    pub generator: String,
    pub seed: u64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

impl RatioReport {
    fn measure(
        inequality: Inequality,
        f: &Grid,
        complexity: usize,
        p: Option<f64>,
        t: Option<f64>,
        numerator: f64,
        denominator: f64,
    ) -> Measurement {
        if !(denominator > 0.0) || !denominator.is_finite() {
            return Measurement::Skipped {
                inequality,
                reason: format!("denominator {denominator} is not a positive finite number"),
            };
        }
        Measurement::Measured(RatioReport {
            inequality,
            dims: f.dims(),
            level: f.level(),
            complexity,
            p,
            t,
            generator: "manual".to_string(),
            seed: 0,
            numerator,
            denominator,
            ratio: numerator / denominator,
        })
    }

    /// Tags the report with the generator and seed that produced its inputs.
    pub fn with_source(mut self, generator: impl Into<String>, seed: u64) -> Self {
        self.generator = generator.into();
        self.seed = seed;
        self
    }

    /// One CSV row; reals carry 17 significant digits.
    pub fn to_csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(fmt_real).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.inequality.tag(),
            self.dims,
            self.level,
            self.complexity,
            opt(self.p),
            opt(self.t),
            self.generator,
            self.seed,
            fmt_real(self.numerator),
            fmt_real(self.denominator),
            fmt_real(self.ratio)
        )
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

/// Outcome of one measurement. Instances with a vanishing denominator are
/// skipped rather than failing, so sweeps keep going.
#[derive(Clone, Debug, PartialEq)]
pub enum Measurement {
    Measured(RatioReport),
    Skipped { inequality: Inequality, reason: String },
}

impl Measurement {
    pub fn report(&self) -> Option<&RatioReport> {
        match self {
            Measurement::Measured(r) => Some(r),
            Measurement::Skipped { .. } => None,
        }
    }

    pub fn into_report(self) -> Option<RatioReport> {
        match self {
            Measurement::Measured(r) => Some(r),
            Measurement::Skipped { .. } => None,
        }
    }

    pub fn ratio(&self) -> Option<f64> {
        self.report().map(|r| r.ratio)
    }
}

/// `max(0, ln s)`.
pub fn log_plus(s: f64) -> f64 {
    if s > 1.0 {
        s.ln()
    } else {
        0.0
    }
}

fn check_t(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return invalid(format!("threshold t = {t} must be positive and finite"));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return invalid(format!("exponent p = {p} must be finite and > 1"));
    }
    Ok(())
}

/// `Σ_x (|f|/t) (1 + log+(|f|/t))^k` times an optional weight.
fn orlicz_sum(f: &Grid, t: f64, power: i32, weight: Option<&Grid>) -> f64 {
    let term = |v: f64| {
        let s = v.abs() / t;
        s * (1.0 + log_plus(s)).powi(power)
    };
    match weight {
        None => f.values().iter().map(|&v| term(v)).sum(),
        Some(w) => f.values().iter().zip(w.values()).map(|(&v, &wv)| term(v) * wv).sum(),
    }
}

/// A pair `(f, w)` with the maximal function of `f` and the composed weight
/// `W = M_c ... M_1 w` computed once and shared by every measurement.
#[derive(Clone, Debug)]
pub struct Instance {
    f: Grid,
    w: Grid,
    complexity: usize,
    max_f: Grid,
    composed_w: Grid,
}

impl Instance {
    pub fn new(f: Grid, w: Grid, complexity: usize) -> Result<Self> {
        f.ensure_same_shape(&w)?;
        w.ensure_weight()?;
        let max_f = maximal(&f, complexity)?;
        let composed_w = compose(&w, complexity)?;
        Ok(Self { f, w, complexity, max_f, composed_w })
    }

    pub fn f(&self) -> &Grid {
        &self.f
    }

    pub fn w(&self) -> &Grid {
        &self.w
    }

    pub fn complexity(&self) -> usize {
        self.complexity
    }

    pub fn maximal_f(&self) -> &Grid {
        &self.max_f
    }

    pub fn composed_weight(&self) -> &Grid {
        &self.composed_w
    }

    pub fn weak_fs(&self, t: f64, p: f64) -> Result<Measurement> {
        check_t(t)?;
        check_p(p)?;
        let num = superlevel_measure(&self.max_f, t, Some(&self.w))?.powf(1.0 / p);
        let den = lp_norm(&self.f, p, Some(&self.composed_w))? / t;
        Ok(RatioReport::measure(Inequality::WeakFs, &self.f, self.complexity, Some(p), Some(t), num, den))
    }

    pub fn strong_fs(&self, p: f64) -> Result<Measurement> {
        check_p(p)?;
        let num = lp_norm(&self.max_f, p, Some(&self.w))?;
        let den = lp_norm(&self.f, p, Some(&self.composed_w))?;
        Ok(RatioReport::measure(Inequality::StrongFs, &self.f, self.complexity, Some(p), None, num, den))
    }

    /// Exploratory variant of [`Instance::strong_fs`] with `W = M_c w`.
    pub fn strong_fs_single_weight(&self, p: f64) -> Result<Measurement> {
        check_p(p)?;
        let single = maximal(&self.w, self.complexity)?;
        let num = lp_norm(&self.max_f, p, Some(&self.w))?;
        let den = lp_norm(&self.f, p, Some(&single))?;
        Ok(RatioReport::measure(Inequality::StrongFsSingleWeight, &self.f, self.complexity, Some(p), None, num, den))
    }

    pub fn endpoint(&self, t: f64) -> Result<Measurement> {
        check_t(t)?;
        let num = superlevel_measure(&self.max_f, t, None)?;
        let den = orlicz_sum(&self.f, t, self.complexity as i32 - 1, None);
        Ok(RatioReport::measure(Inequality::Endpoint, &self.f, self.complexity, None, Some(t), num, den))
    }

    /// Two-dimensional `L log L` bound with `W = M_2 M_1 w`; independent of
    /// the instance complexity.
    pub fn llogl_2d(&self, t: f64) -> Result<Measurement> {
        check_t(t)?;
        if self.f.dims() != 2 {
            return invalid(format!("the L log L ratio is two-dimensional, got d = {}", self.f.dims()));
        }
        let (max_f, weight) = if self.complexity == 2 {
            (self.max_f.clone(), self.composed_w.clone())
        } else {
            (maximal(&self.f, 2)?, compose_strong_over_cube_2d(&self.w)?)
        };
        let num = superlevel_measure(&max_f, t, Some(&self.w))?;
        let den = orlicz_sum(&self.f, t, 1, Some(&weight));
        Ok(RatioReport::measure(Inequality::LlogL2d, &self.f, 2, None, Some(t), num, den))
    }
}

/// `w({M_c f > t})^(1/p) / ((1/t) ||f||_{L^p(W)})`.
pub fn weak_fs_ratio(f: &Grid, w: &Grid, t: f64, p: f64, c: usize) -> Result<Measurement> {
    check_t(t)?;
    check_p(p)?;
    Instance::new(f.clone(), w.clone(), c)?.weak_fs(t, p)
}

/// `||M_c f||_{L^p(w)} / ||f||_{L^p(W)}`.
pub fn strong_fs_ratio(f: &Grid, w: &Grid, p: f64, c: usize) -> Result<Measurement> {
    check_p(p)?;
    Instance::new(f.clone(), w.clone(), c)?.strong_fs(p)
}

/// `|{M_c f > t}| / Σ (|f|/t)(1 + log+(|f|/t))^(c-1)`.
pub fn endpoint_ratio(f: &Grid, t: f64, c: usize) -> Result<Measurement> {
    check_t(t)?;
    let max_f = maximal(f, c)?;
    let num = superlevel_measure(&max_f, t, None)?;
    let den = orlicz_sum(f, t, c as i32 - 1, None);
    Ok(RatioReport::measure(Inequality::Endpoint, f, c, None, Some(t), num, den))
}

/// `w({M_2 f > t}) / Σ (|f|/t)(1 + log+(|f|/t)) M_2 M_1 w` on `d = 2`.
pub fn llogl_ratio_2d(f: &Grid, w: &Grid, t: f64) -> Result<Measurement> {
    check_t(t)?;
    if f.dims() != 2 {
        return invalid(format!("the L log L ratio is two-dimensional, got d = {}", f.dims()));
    }
    Instance::new(f.clone(), w.clone(), 2)?.llogl_2d(t)
}

/// [`apstar`] as a report with denominator 1, so sweeps can tabulate it
/// alongside the ratios.
pub fn apstar_report(w: &Grid, p: f64) -> Result<Measurement> {
    let value = apstar(w, p)?;
    Ok(RatioReport::measure(Inequality::Apstar, w, w.dims(), Some(p), None, value, 1.0))
}

/// `[w]_{A_p*}` over all dyadic rectangles:
/// `max_R avg_R(w) avg_R(w^(-1/(p-1)))^(p-1)` for `p > 1`, and
/// `max_R avg_R(w) / min_R(w)` for `p = 1`. The weight must be positive.
pub fn apstar(w: &Grid, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return invalid(format!("exponent p = {p} must be finite and >= 1"));
    }
    if let Some(pos) = w.values().iter().position(|&v| !(v > 0.0)) {
        return invalid(format!(
            "A_p* needs a strictly positive weight; cell {:?} holds {}",
            w.coords(pos),
            w.values()[pos]
        ));
    }
    let dims = w.dims();
    let level = w.level();
    let sat_w = SummedAreaTable::build(w)?;
    let dual = if p > 1.0 {
        let exponent = -1.0 / (p - 1.0);
        Some(SummedAreaTable::build(&w.map(|v| v.powf(exponent))?)?)
    } else {
        None
    };

    let side = w.side();
    let mut best = f64::NEG_INFINITY;
    for shape in enumerate_shapes(level, dims, dims)? {
        let lens: Vec<usize> = shape.levels().iter().map(|&k| side >> k).collect();
        let blocks: Vec<usize> = shape.levels().iter().map(|&k| 1usize << k).collect();
        let volume = lens.iter().product::<usize>() as f64;
        let mut idx = vec![0usize; dims];
        for _ in 0..blocks.iter().product::<usize>() {
            let lo: Vec<usize> = (0..dims).map(|i| idx[i] * lens[i]).collect();
            let hi: Vec<usize> = (0..dims).map(|i| lo[i] + lens[i]).collect();
            let avg_w = sat_w.box_sum_unchecked(&lo, &hi) / volume;
            let value = match &dual {
                Some(sat_dual) => avg_w * (sat_dual.box_sum_unchecked(&lo, &hi) / volume).powf(p - 1.0),
                None => {
                    let min = box_cells(&lo, &hi, side)
                        .into_iter()
                        .map(|c| w.values()[c])
                        .fold(f64::INFINITY, f64::min);
                    avg_w / min
                }
            };
            best = best.max(value);
            for i in (0..dims).rev() {
                idx[i] += 1;
                if idx[i] < blocks[i] {
                    break;
                }
                idx[i] = 0;
            }
        }
    }
    Ok(best)
}

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return invalid(format!("m = {m} must be at least 2"));
    }
    Ok(())
}

/// `φ(a) = ∫_0^a exp(s^(1/(m-1))) ds`.
///
/// Uses the expansion `a + Σ_{k>=1} (m-1)/((k+m-1) k!) a^((k+m-1)/(m-1))`
/// up to [`PHI_SERIES_LIMIT`], and adaptive quadrature beyond it.
pub fn phi(a: f64, m: usize) -> Result<f64> {
    check_m(m)?;
    if !(a >= 0.0) || !a.is_finite() {
        return invalid(format!("phi needs a finite a >= 0, got {a}"));
    }
    if a == 0.0 {
        return Ok(0.0);
    }
    let value = if a <= PHI_SERIES_LIMIT { phi_series(a, m) } else { phi_quadrature(a, m) };
    if !value.is_finite() {
        return invalid(format!("phi({a}, {m}) overflows"));
    }
    Ok(value)
}

fn phi_series(a: f64, m: usize) -> f64 {
    let q = (m - 1) as f64;
    let u = a.powf(1.0 / q);
    let mut sum = a;
    // u^k / k!
    let mut scaled_power = 1.0;
    for k in 1..100_000u32 {
        let kf = f64::from(k);
        scaled_power *= u / kf;
        let term = q / (kf + q) * a * scaled_power;
        sum += term;
        if kf > u && term < 1e-15 * sum {
            break;
        }
    }
    sum
}

/// `φ(a) = (m-1) ∫_0^U u^(m-2) e^u du` with `U = a^(1/(m-1))`, by composite
/// 8-point Gauss–Legendre on panels of width at most 1/4.
fn phi_quadrature(a: f64, m: usize) -> f64 {
    const NODES: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
    const WEIGHTS: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
    let q = (m - 1) as f64;
    let upper = a.powf(1.0 / q);
    let integrand = |u: f64| q * u.powi(m as i32 - 2) * u.exp();
    let panels = (4.0 * upper).ceil().max(1.0) as usize;
    let h = upper / panels as f64;
    let mut total = 0.0;
    for i in 0..panels {
        let mid = (i as f64 + 0.5) * h;
        let half = 0.5 * h;
        let panel: f64 = NODES
            .iter()
            .zip(WEIGHTS)
            .map(|(&x, w)| w * (integrand(mid - half * x) + integrand(mid + half * x)))
            .sum();
        total += half * panel;
    }
    total
}

/// `φ(a) + b (log+ b)^(m-1) - ab`, nonnegative by the Young-type bound.
pub fn young_gap(a: f64, b: f64, m: usize) -> Result<f64> {
    if !(b > 0.0) || !b.is_finite() {
        return invalid(format!("young_gap needs a finite b > 0, got {b}"));
    }
    let phi_a = phi(a, m)?;
    Ok(phi_a + b * log_plus(b).powi(m as i32 - 1) - a * b)
}

/// `s Σ_i a_i (Σ_{j<=i} a_j)^(s-1) - (Σ_i a_i)^s`, nonnegative for `s > 1`
/// and `a_i >= 0`.
pub fn elementary_ineq_gap(a: &[f64], s: f64) -> Result<f64> {
    if !(s > 1.0) || !s.is_finite() {
        return invalid(format!("exponent s = {s} must be finite and > 1"));
    }
    if let Some(v) = a.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
        return invalid(format!("sequence entries must be finite and >= 0, got {v}"));
    }
    let mut partial = 0.0;
    let mut weighted = 0.0;
    for &x in a {
        partial += x;
        weighted += x * partial.powf(s - 1.0);
    }
    Ok(s * weighted - partial.powf(s))
}
