//! Empirical approximation-rate experiments: a registry of test functions
//! closed under the differential operators of interest (so every analytic
//! image is computed symbolically), best-error measurement across a degree
//! range, and boundedness statistics for the rate ratios.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expansion::{expand, BestError, CoefficientTable};
use crate::polyalg::FloatPoly;
use crate::quadrature::{build_ball_rule, BallQuadrature};
use crate::spherical::{harmonic_basis, HarmonicIndex};

/// Elementary factor carried by each term of a [`SymFn`]. The set is closed
/// under partial derivatives and angular derivatives up to polynomial
/// prefactors.
#[derive(Clone, Debug)]
pub enum Atom {
    /// plain polynomial term
    One,
    /// exp(|x|^2)
    ExpNormSq,
    /// exp(x_1 + ... + x_d)
    ExpSum,
    /// (1 - |x|^2)^gamma
    BallPow(f64),
    /// |x|^{-2m} for m >= 1
    InvNormSq(u32),
}

impl Atom {
    fn key(&self) -> (u8, u64) {
        match self {
            Atom::One => (0, 0),
            Atom::ExpNormSq => (1, 0),
            Atom::ExpSum => (2, 0),
            Atom::BallPow(g) => (3, g.to_bits()),
            Atom::InvNormSq(m) => (4, *m as u64),
        }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Atom::One => 1.0,
            Atom::ExpNormSq => x.iter().map(|v| v * v).sum::<f64>().exp(),
            Atom::ExpSum => x.iter().sum::<f64>().exp(),
            Atom::BallPow(g) => (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0).powf(*g),
            Atom::InvNormSq(m) => x.iter().map(|v| v * v).sum::<f64>().powi(-(*m as i32)),
        }
    }
}

/// A finite sum of polynomial-times-atom terms; all differential operators
/// used by the experiments act within this class.
#[derive(Clone, Debug)]
pub struct SymFn {
    dim: usize,
    terms: Vec<(FloatPoly, Atom)>,
}

impl SymFn {
    pub fn from_poly(p: FloatPoly) -> Self {
        SymFn { dim: p.dim(), terms: vec![(p, Atom::One)] }.normalized()
    }

    pub fn single(p: FloatPoly, atom: Atom) -> Self {
        SymFn { dim: p.dim(), terms: vec![(p, atom)] }.normalized()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn normalized(mut self) -> Self {
        let mut merged: Vec<(FloatPoly, Atom)> = Vec::new();
        self.terms.sort_by_key(|(_, a)| a.key());
        for (p, a) in self.terms.drain(..) {
            if p.is_zero() {
                continue;
            }
            if let Some(last) = merged.last_mut() {
                if last.1.key() == a.key() {
                    last.0 = last.0.add(&p).unwrap();
                    continue;
                }
            }
            merged.push((p, a));
        }
        merged.retain(|(p, _)| !p.is_zero());
        self.terms = merged;
        self
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(p, a)| p.eval_f64(x) * a.eval(x)).sum()
    }

    /// Exact symbolic partial derivative (exact up to f64 coefficient
    /// arithmetic).
    pub fn diff(&self, axis: usize) -> Self {
        let d = self.dim;
        let mut out: Vec<(FloatPoly, Atom)> = Vec::new();
        let xi = FloatPoly::var(d, axis);
        for (p, a) in &self.terms {
            out.push((p.diff(axis).unwrap(), a.clone()));
            match a {
                Atom::One => {}
                Atom::ExpNormSq => {
                    out.push((xi.scale(&2.0).mul(p).unwrap(), Atom::ExpNormSq));
                }
                Atom::ExpSum => {
                    out.push((p.clone(), Atom::ExpSum));
                }
                Atom::BallPow(g) => {
                    out.push((xi.scale(&(-2.0 * g)).mul(p).unwrap(), Atom::BallPow(g - 1.0)));
                }
                Atom::InvNormSq(m) => {
                    out.push((
                        xi.scale(&(-2.0 * *m as f64)).mul(p).unwrap(),
                        Atom::InvNormSq(m + 1),
                    ));
                }
            }
        }
        SymFn { dim: d, terms: out }.normalized()
    }

    /// Angular derivative x_i d_j - x_j d_i. All radial atoms commute with
    /// it; the exponential-of-sum atom contributes (x_i - x_j).
    pub fn angular_derivative(&self, i: usize, j: usize) -> Self {
        let d = self.dim;
        let mut out: Vec<(FloatPoly, Atom)> = Vec::new();
        let xi = FloatPoly::var(d, i);
        let xj = FloatPoly::var(d, j);
        for (p, a) in &self.terms {
            out.push((p.angular_derivative(i, j).unwrap(), a.clone()));
            if let Atom::ExpSum = a {
                out.push((xi.sub(&xj).unwrap().mul(p).unwrap(), Atom::ExpSum));
            }
        }
        SymFn { dim: d, terms: out }.normalized()
    }

    pub fn laplacian(&self) -> Self {
        let mut acc: Option<SymFn> = None;
        for axis in 0..self.dim {
            let dd = self.diff(axis).diff(axis);
            acc = Some(match acc {
                None => dd,
                Some(a) => a.add(&dd),
            });
        }
        acc.unwrap()
    }

    /// Laplace-Beltrami via the sum of squared angular derivatives.
    pub fn beltrami(&self) -> Self {
        let mut acc: Option<SymFn> = None;
        for i in 0..self.dim {
            for j in (i + 1)..self.dim {
                let dd = self.angular_derivative(i, j).angular_derivative(i, j);
                acc = Some(match acc {
                    None => dd,
                    Some(a) => a.add(&dd),
                });
            }
        }
        acc.unwrap()
    }

    pub fn add(&self, other: &SymFn) -> SymFn {
        assert_eq!(self.dim, other.dim);
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        SymFn { dim: self.dim, terms }.normalized()
    }

    pub fn iterate(&self, op: impl Fn(&SymFn) -> SymFn, times: u32) -> SymFn {
        let mut cur = self.clone();
        for _ in 0..times {
            cur = op(&cur);
        }
        cur
    }
}

/// Smoothness class of a registry function; drives which (s, mu) experiments
/// are meaningful and which functions enter the boundedness gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SmoothClass {
    Entire,
    /// polynomial solid harmonic of the given degree (exact-approximation
    /// regime beyond it)
    Harmonic(u32),
    /// degree-0 homogeneous extension of a sphere function
    Spherical,
    /// (1 - |x|^2)^gamma
    FinitePow(f64),
}

pub struct TestFunction {
    pub name: String,
    pub dim: usize,
    pub f: SymFn,
    pub class: SmoothClass,
}

impl TestFunction {
    /// Sobolev order available to this function at a given weight: the
    /// even-order theorem at order s needs W_2^{2s}.
    pub fn supports_even(&self, s: u32, mu: f64) -> bool {
        match self.class {
            SmoothClass::Entire | SmoothClass::Harmonic(_) => true,
            SmoothClass::Spherical => false,
            SmoothClass::FinitePow(g) => 2.0 * s as f64 != 0.0 && ((2 * s) as f64) < 2.0 * g + mu + 1.0,
        }
    }

    pub fn supports_odd(&self, s: u32, mu: f64) -> bool {
        match self.class {
            SmoothClass::Entire | SmoothClass::Harmonic(_) => true,
            SmoothClass::Spherical => s == 0 && self.dim == 3,
            SmoothClass::FinitePow(g) => ((2 * s + 1) as f64) < 2.0 * g + mu + 1.0,
        }
    }

    /// Functions whose measured ratios enter the max-vs-median gate:
    /// polynomials sit in the exact-approximation regime and are excluded.
    pub fn gate_eligible(&self) -> bool {
        matches!(self.class, SmoothClass::Entire | SmoothClass::FinitePow(_))
    }
}

/// The shipped registry for one dimension.
pub fn registry(d: usize) -> Vec<TestFunction> {
    let mut out = Vec::new();
    out.push(TestFunction {
        name: "radial_exp".into(),
        dim: d,
        f: SymFn::single(FloatPoly::one(d), Atom::ExpNormSq),
        class: SmoothClass::Entire,
    });
    out.push(TestFunction {
        name: "exp_sum".into(),
        dim: d,
        f: SymFn::single(FloatPoly::one(d), Atom::ExpSum),
        class: SmoothClass::Entire,
    });
    out.push(TestFunction {
        name: "gamma15".into(),
        dim: d,
        f: SymFn::single(FloatPoly::one(d), Atom::BallPow(1.5)),
        class: SmoothClass::FinitePow(1.5),
    });
    // solid harmonic of degree 8: dyadic coefficients, so the float image is
    // exact and its Laplacian cancels to a structural zero
    let harm_deg = 8u32;
    let idx = if d == 2 {
        HarmonicIndex::new(vec![0, harm_deg]).unwrap()
    } else {
        let mut comps = vec![0u32; d];
        comps[d - 1] = harm_deg;
        HarmonicIndex::new(comps).unwrap()
    };
    out.push(TestFunction {
        name: "harmonic8".into(),
        dim: d,
        f: SymFn::from_poly(harmonic_basis(&idx).to_float()),
        class: SmoothClass::Harmonic(harm_deg),
    });
    if d == 3 {
        // degree-2 zonal harmonic restricted to the sphere: Y(x)/|x|^2
        let y = harmonic_basis(&HarmonicIndex::new(vec![0, 0, 2]).unwrap()).to_float();
        out.push(TestFunction {
            name: "spherical_h2".into(),
            dim: d,
            f: SymFn::single(y, Atom::InvNormSq(1)),
            class: SmoothClass::Spherical,
        });
    }
    out
}

pub fn find_function(d: usize, name: &str) -> Result<TestFunction> {
    registry(d)
        .into_iter()
        .find(|t| t.name == name)
        .ok_or_else(|| Error::UnknownFunction(name.to_string()))
}

/// Which theorem a report measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum RateMode {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug)]
pub struct RateRow {
    pub n: u32,
    pub e_f: f64,
    /// even: E_{n-2s}(Lap^s f); odd: sum_i E_{n-2s-1}(d_i Lap^s f)
    pub e_lap: f64,
    /// even: E_n(Bel^s f); odd: sum_{i<j} E_n(D_ij Bel^s f)
    pub e_bel: f64,
    /// n^{2s} (even) or n^{2s+1} (odd) times e_f over (e_lap + e_bel),
    /// only where every participating error is trustworthy
    pub ratio: Option<f64>,
}

pub struct RateReport {
    pub func: String,
    pub mode: RateMode,
    pub d: usize,
    pub mu: f64,
    pub s: u32,
    pub n_max: u32,
    pub rows: Vec<RateRow>,
    /// least-squares slope of log E_n(f) against log n over reliable rows
    pub slope: Option<f64>,
    /// max over n of n^{2s} E_n(f) / (|Lap^s f| + |Bel^s f|), when defined
    pub corollary_ratio: Option<f64>,
    /// first measured n at which a polynomial input reached exact
    /// approximation (E_n at the noise floor)
    pub exact_regime_from: Option<u32>,
}

impl RateReport {
    /// (max, median, count) of the ratio column.
    pub fn bounded_stats(&self) -> Option<(f64, f64, usize)> {
        let mut ratios: Vec<f64> = self.rows.iter().filter_map(|r| r.ratio).collect();
        if ratios.is_empty() {
            return None;
        }
        ratios.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let max = *ratios.last().unwrap();
        let median = if ratios.len() % 2 == 1 {
            ratios[ratios.len() / 2]
        } else {
            0.5 * (ratios[ratios.len() / 2 - 1] + ratios[ratios.len() / 2])
        };
        Some((max, median, ratios.len()))
    }

    /// CSV with the pinned six-column schema; the fitted slope is a
    /// report-level scalar repeated per row.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(
            w,
            "# func={},mode={},d={},mu={},s={},N={}",
            self.func,
            match self.mode {
                RateMode::Even => "even",
                RateMode::Odd => "odd",
            },
            self.d,
            self.mu,
            self.s,
            self.n_max
        )?;
        writeln!(w, "n,E_f,E_lap,E_bel,ratio,slope")?;
        let slope = self.slope.map(|s| s.to_string()).unwrap_or_default();
        for r in &self.rows {
            let ratio = r.ratio.map(|v| v.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{},{},{}", r.n, r.e_f, r.e_lap, r.e_bel, ratio, slope)?;
        }
        Ok(())
    }
}

/// Shared caches: quadrature rules per (d, mu, degree) and coefficient tables
/// per (image name, mu). Rules certify once; tables are reused across
/// experiments.
pub struct ExperimentContext {
    pub quad_degree_override: Option<u32>,
    rules: HashMap<(usize, u64, u32), Arc<BallQuadrature>>,
    tables: HashMap<(String, usize, u64, u32), Arc<CoefficientTable>>,
}

impl Default for ExperimentContext {
    fn default() -> Self {
        Self::new()
    }
}

impl ExperimentContext {
    pub fn new() -> Self {
        ExperimentContext { quad_degree_override: None, rules: HashMap::new(), tables: HashMap::new() }
    }

    fn rule(&mut self, d: usize, mu: f64, degree: u32) -> Result<Arc<BallQuadrature>> {
        let key = (d, mu.to_bits(), degree);
        if let Some(r) = self.rules.get(&key) {
            return Ok(r.clone());
        }
        let r = Arc::new(build_ball_rule(d, mu, degree)?);
        self.rules.insert(key, r.clone());
        Ok(r)
    }

    /// Expansion of a (possibly derived) image at a given weight, memoized by
    /// the image's name.
    pub fn table(
        &mut self,
        name: &str,
        f: &SymFn,
        mu: f64,
        n_max: u32,
    ) -> Result<Arc<CoefficientTable>> {
        let d = f.dim();
        let key = (name.to_string(), d, mu.to_bits(), n_max);
        if let Some(t) = self.tables.get(&key) {
            return Ok(t.clone());
        }
        let degree = self.quad_degree_override.unwrap_or(2 * n_max + 20).max(2 * n_max);
        let rule = self.rule(d, mu, degree)?;
        let func = f.clone();
        let t = Arc::new(expand(&move |x: &[f64]| func.eval(x), n_max, &rule)?);
        self.tables.insert(key, t.clone());
        Ok(t)
    }
}

/// The degree grid of an experiment.
#[derive(Clone, Copy, Debug)]
pub struct DegreeRange {
    pub min: u32,
    pub max: u32,
    pub step: u32,
}

impl Default for DegreeRange {
    fn default() -> Self {
        DegreeRange { min: 4, max: 40, step: 2 }
    }
}

impl DegreeRange {
    pub fn values(&self) -> Vec<u32> {
        (self.min..=self.max).step_by(self.step.max(1) as usize).collect()
    }
}

const EXACT_REGIME_REL: f64 = 1e-10;

fn zero_error() -> BestError {
    BestError { value: 0.0, sq: 0.0, tail_guard: 0.0, reliable: true }
}

struct ErrorColumn {
    /// None encodes a symbolically zero image (errors identically zero).
    errors: Option<Vec<BestError>>,
    norm: f64,
}

impl ErrorColumn {
    fn at(&self, n: u32) -> BestError {
        match &self.errors {
            None => zero_error(),
            Some(v) => v[n as usize],
        }
    }
}

fn column(
    ctx: &mut ExperimentContext,
    name: &str,
    f: &SymFn,
    mu: f64,
    n_max: u32,
) -> Result<ErrorColumn> {
    if f.is_zero() {
        return Ok(ErrorColumn { errors: None, norm: 0.0 });
    }
    let t = ctx.table(name, f, mu, n_max)?;
    Ok(ErrorColumn { errors: Some(t.best_errors()), norm: t.f_norm_sq.max(0.0).sqrt() })
}

fn fit_slope(rows: &[(f64, f64)]) -> Option<f64> {
    if rows.len() < 3 {
        return None;
    }
    let n = rows.len() as f64;
    let sx: f64 = rows.iter().map(|r| r.0).sum();
    let sy: f64 = rows.iter().map(|r| r.1).sum();
    let sxx: f64 = rows.iter().map(|r| r.0 * r.0).sum();
    let sxy: f64 = rows.iter().map(|r| r.0 * r.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-12 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

fn assemble_report(
    func: &TestFunction,
    mode: RateMode,
    mu: f64,
    s: u32,
    range: &DegreeRange,
    n_max: u32,
    f_col: ErrorColumn,
    lap_col: ErrorColumn,
    bel_col: ErrorColumn,
    lap_shift: u32,
    exponent: u32,
) -> RateReport {
    let f_norm = f_col.norm;
    let mut rows = Vec::new();
    let mut slope_pts = Vec::new();
    let mut exact_from = None;
    for n in range.values() {
        if n < lap_shift || n > n_max {
            continue;
        }
        let ef = f_col.at(n);
        let el = lap_col.at(n - lap_shift);
        let eb = bel_col.at(n);
        let denom = el.value + eb.value;
        let trustworthy = ef.reliable && el.reliable && eb.reliable && denom > 0.0;
        let ratio = if trustworthy {
            Some((n as f64).powi(exponent as i32) * ef.value / denom)
        } else {
            None
        };
        if matches!(func.class, SmoothClass::Harmonic(_))
            && ef.value <= EXACT_REGIME_REL * f_norm
            && exact_from.is_none()
        {
            exact_from = Some(n);
        }
        if ef.reliable && ef.value > 0.0 {
            slope_pts.push(((n as f64).ln(), ef.value.ln()));
        }
        rows.push(RateRow { n, e_f: ef.value, e_lap: el.value, e_bel: eb.value, ratio });
    }
    let slope = fit_slope(&slope_pts);
    let denom_norm = lap_col.norm + bel_col.norm;
    let corollary_ratio = if denom_norm > 0.0 {
        rows.iter()
            .filter(|r| r.e_f > 0.0)
            .map(|r| (r.n as f64).powi(exponent as i32) * r.e_f / denom_norm)
            .fold(None, |acc: Option<f64>, v| Some(acc.map_or(v, |a| a.max(v))))
    } else {
        None
    };
    RateReport {
        func: func.name.clone(),
        mode,
        d: func.dim,
        mu,
        s,
        n_max,
        rows,
        slope,
        corollary_ratio,
        exact_regime_from: exact_from,
    }
}

/// Even-order experiment: E_n(f) against E_{n-2s}(Lap^s f) at mu+2s and
/// E_n(Bel^s f) at mu, with ratio exponent 2s.
pub fn measure_even(
    ctx: &mut ExperimentContext,
    func: &TestFunction,
    mu: f64,
    s: u32,
    range: &DegreeRange,
    n_max: u32,
) -> Result<RateReport> {
    if s == 0 {
        return Err(Error::InvalidParameter("even-order experiments need s >= 1".into()));
    }
    if n_max < range.max + 5 {
        return Err(Error::InvalidParameter(format!(
            "table degree {n_max} leaves no tail margin beyond the range maximum {}",
            range.max
        )));
    }
    let lap = func.f.iterate(|g| g.laplacian(), s);
    let bel = func.f.iterate(|g| g.beltrami(), s);
    let f_col = column(ctx, &func.name, &func.f, mu, n_max)?;
    let lap_col = column(ctx, &format!("{}|lap{}", func.name, s), &lap, mu + 2.0 * s as f64, n_max)?;
    let bel_col = column(ctx, &format!("{}|bel{}", func.name, s), &bel, mu, n_max)?;
    Ok(assemble_report(
        func,
        RateMode::Even,
        mu,
        s,
        range,
        n_max,
        f_col,
        lap_col,
        bel_col,
        2 * s,
        2 * s,
    ))
}

/// Odd-order experiment: E_n(f) against the summed partial-derivative errors
/// of Lap^s f at mu+2s+1 (degree n-2s-1) and the summed angular-derivative
/// errors of Bel^s f at mu, with ratio exponent 2s+1.
pub fn measure_odd(
    ctx: &mut ExperimentContext,
    func: &TestFunction,
    mu: f64,
    s: u32,
    range: &DegreeRange,
    n_max: u32,
) -> Result<RateReport> {
    if n_max < range.max + 5 {
        return Err(Error::InvalidParameter(format!(
            "table degree {n_max} leaves no tail margin beyond the range maximum {}",
            range.max
        )));
    }
    let d = func.dim;
    let lap_s = func.f.iterate(|g| g.laplacian(), s);
    let bel_s = func.f.iterate(|g| g.beltrami(), s);
    let mut partial_cols = Vec::new();
    for i in 0..d {
        let img = lap_s.diff(i);
        partial_cols.push(column(
            ctx,
            &format!("{}|lap{}|d{}", func.name, s, i),
            &img,
            mu + 2.0 * s as f64 + 1.0,
            n_max,
        )?);
    }
    let mut angular_cols = Vec::new();
    for i in 0..d {
        for j in (i + 1)..d {
            let img = bel_s.angular_derivative(i, j);
            angular_cols.push(column(
                ctx,
                &format!("{}|bel{}|D{}{}", func.name, s, i, j),
                &img,
                mu,
                n_max,
            )?);
        }
    }
    let f_col = column(ctx, &func.name, &func.f, mu, n_max)?;

    // fold the summed columns into the two-denominator shape
    let shift = 2 * s + 1;
    let fold = |cols: &[ErrorColumn], n: u32| -> BestError {
        let mut value = 0.0;
        let mut reliable = true;
        for c in cols {
            let e = c.at(n);
            value += e.value;
            reliable &= e.reliable;
        }
        BestError { value, sq: value * value, tail_guard: 0.0, reliable }
    };
    let lap_errors: Vec<BestError> = (0..=n_max).map(|n| fold(&partial_cols, n)).collect();
    let bel_errors: Vec<BestError> = (0..=n_max).map(|n| fold(&angular_cols, n)).collect();
    let lap_all_zero = partial_cols.iter().all(|c| c.errors.is_none());
    let bel_all_zero = angular_cols.iter().all(|c| c.errors.is_none());
    let lap_col = ErrorColumn {
        errors: if lap_all_zero { None } else { Some(lap_errors) },
        norm: partial_cols.iter().map(|c| c.norm).sum(),
    };
    let bel_col = ErrorColumn {
        errors: if bel_all_zero { None } else { Some(bel_errors) },
        norm: angular_cols.iter().map(|c| c.norm).sum(),
    };
    Ok(assemble_report(
        func,
        RateMode::Odd,
        mu,
        s,
        range,
        n_max,
        f_col,
        lap_col,
        bel_col,
        shift,
        2 * s + 1,
    ))
}

/// The boundedness gate: the ratio column must have at least `min_points`
/// entries and satisfy max <= 3 * median.
pub fn check_bounded(report: &RateReport, min_points: usize) -> Result<(f64, f64)> {
    let (max, median, count) = report.bounded_stats().ok_or_else(|| {
        Error::Reliability(format!(
            "{} ({:?}, mu={}, s={}): no trustworthy ratio rows",
            report.func, report.mode, report.mu, report.s
        ))
    })?;
    if count < min_points {
        return Err(Error::Reliability(format!(
            "{} ({:?}, mu={}, s={}): only {count} trustworthy ratio rows",
            report.func, report.mode, report.mu, report.s
        )));
    }
    Ok((max, median))
}
