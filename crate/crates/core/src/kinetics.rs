//! Charge-transfer kinetics, their linearization, and the open-circuit potential.
//!
//! Dimensionless current j̃ is scaled by the kinetic prefactor j0 and is positive for
//! reduction (lithiation of the cathode). Overpotentials are in thermal-voltage units and
//! measured from the open-circuit potential, so every model gives j̃ = 0 at η̃ = 0.

use std::path::Path;

use crate::numerics::{bisect, erfc, Pchip};
use crate::{Error, Result, BOLTZMANN_EV};

/// Concentration dependence of the Butler–Volmer exchange current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExchangeForm {
    /// f_BV = 1.
    Constant,
    /// f_BV = c̃_s^α (1 − c̃_s)^(1−α) c̃_l^(1−α).
    Intercalation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KineticsModel {
    ButlerVolmer { alpha: f64, exchange: ExchangeForm },
    /// Ion-coupled electron transfer limit: Butler–Volmer shape with an additional
    /// vacancy factor (1 − c̃_s).
    Icet { alpha: f64 },
    /// Electron-coupled ion transfer limit with Marcus–Hush–Chidsey style erfc cap.
    /// `lambda` and `w_ads` are in thermal-voltage units.
    Ecit { lambda: f64, w_ads: f64, a_plus: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticsSpec {
    /// Kinetic prefactor, A/m².
    pub j0: f64,
    pub model: KineticsModel,
}

impl KineticsSpec {
    /// Baseline ECIT kinetics for NMC532 at 298.15 K.
    pub fn nmc532() -> Self {
        Self::ecit_from_energies(5.0, 0.11, 0.025, 1.9, 298.15)
    }

    /// ECIT kinetics from a reorganization energy and adsorption free energy in eV.
    pub fn ecit_from_energies(j0: f64, lambda_ev: f64, w_ads_ev: f64, a_plus: f64, temperature: f64) -> Self {
        let kt = BOLTZMANN_EV * temperature;
        KineticsSpec {
            j0,
            model: KineticsModel::Ecit {
                lambda: lambda_ev / kt,
                w_ads: w_ads_ev / kt,
                a_plus,
            },
        }
    }

    pub fn butler_volmer(j0: f64, alpha: f64) -> Self {
        KineticsSpec {
            j0,
            model: KineticsModel::ButlerVolmer {
                alpha,
                exchange: ExchangeForm::Intercalation,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.j0 > 0.0 && self.j0.is_finite()) {
            return Err(Error::invalid("j0", format!("must be positive, got {}", self.j0)));
        }
        match self.model {
            KineticsModel::ButlerVolmer { alpha, .. } | KineticsModel::Icet { alpha } => {
                if !(alpha > 0.0 && alpha < 1.0) {
                    return Err(Error::invalid("alpha", format!("must lie in (0, 1), got {alpha}")));
                }
            }
            KineticsModel::Ecit { lambda, w_ads, a_plus } => {
                if !(lambda > 0.0 && lambda.is_finite()) {
                    return Err(Error::invalid("lambda", format!("must be positive, got {lambda}")));
                }
                if !w_ads.is_finite() {
                    return Err(Error::invalid("w_ads", "must be finite"));
                }
                if !(a_plus > 0.0 && a_plus.is_finite()) {
                    return Err(Error::invalid("a_plus", format!("must be positive, got {a_plus}")));
                }
            }
        }
        Ok(())
    }

    /// Dimensionless current j̃ at filling `c_s`, scaled electrolyte concentration `c_l`
    /// (c/c_ref) and overpotential `eta`. Zero at a saturated (0 or 1) filling.
    pub fn current_density(&self, c_s: f64, c_l: f64, eta: f64) -> f64 {
        if !(c_s > 0.0 && c_s < 1.0) {
            return 0.0;
        }
        match self.model {
            KineticsModel::ButlerVolmer { alpha, exchange } => {
                bv_exchange(exchange, alpha, c_s, c_l) * bv_shape(alpha, eta)
            }
            KineticsModel::Icet { alpha } => {
                (1.0 - c_s) * bv_exchange(ExchangeForm::Intercalation, alpha, c_s, c_l) * bv_shape(alpha, eta)
            }
            KineticsModel::Ecit { lambda, .. } => {
                let theta = self.adsorbed_fraction(c_l);
                -ecit_rate(c_s, theta, eta + (theta / c_s).ln(), lambda)
            }
        }
    }

    /// Linearization prefactor f = −∂j̃/∂η̃ at η̃ = 0.
    pub fn linearize(&self, c_s: f64, c_l: f64) -> f64 {
        if !(c_s > 0.0 && c_s < 1.0) {
            return 0.0;
        }
        match self.model {
            KineticsModel::ButlerVolmer { alpha, exchange } => bv_exchange(exchange, alpha, c_s, c_l),
            KineticsModel::Icet { alpha } => {
                (1.0 - c_s) * bv_exchange(ExchangeForm::Intercalation, alpha, c_s, c_l)
            }
            KineticsModel::Ecit { lambda, .. } => {
                let theta = self.adsorbed_fraction(c_l);
                let ell = (theta / c_s).ln();
                (1.0 - c_s) * c_s * theta / (c_s + theta) * ecit_cap(ell, lambda)
            }
        }
    }

    /// Adsorbed Li⁺ coverage a₊c̃_l e^(−w̃)/(1 + a₊c̃_l e^(−w̃)); for non-ECIT models the
    /// electrolyte concentration itself.
    pub fn adsorbed_fraction(&self, c_l: f64) -> f64 {
        match self.model {
            KineticsModel::Ecit { w_ads, a_plus, .. } => {
                let a = a_plus * c_l.max(0.0) * (-w_ads).exp();
                a / (1.0 + a)
            }
            _ => c_l,
        }
    }

    /// ∂f/∂c̃_s by central difference.
    pub fn filling_derivative(&self, c_s: f64, c_l: f64) -> f64 {
        let h = 1e-6_f64.min(0.5 * c_s.min(1.0 - c_s));
        (self.linearize(c_s + h, c_l) - self.linearize(c_s - h, c_l)) / (2.0 * h)
    }

    /// ∂f/∂c̃_l by central difference.
    pub fn electrolyte_derivative(&self, c_s: f64, c_l: f64) -> f64 {
        let h = 1e-6 * c_l.max(1e-3);
        (self.linearize(c_s, c_l + h) - self.linearize(c_s, c_l - h)) / (2.0 * h)
    }

    /// Electrolyte sensitivity (1/f)·∂f/∂c̃_l at c̃_l = 1.
    pub fn electrolyte_sensitivity(&self, c_s: f64) -> f64 {
        self.electrolyte_derivative(c_s, 1.0) / self.linearize(c_s, 1.0)
    }
}

fn bv_exchange(form: ExchangeForm, alpha: f64, c_s: f64, c_l: f64) -> f64 {
    match form {
        ExchangeForm::Constant => 1.0,
        ExchangeForm::Intercalation => c_s.powf(alpha) * ((1.0 - c_s) * c_l.max(0.0)).powf(1.0 - alpha),
    }
}

fn bv_shape(alpha: f64, eta: f64) -> f64 {
    (-alpha * eta).exp() - ((1.0 - alpha) * eta).exp()
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn ecit_cap(eta_f: f64, lambda: f64) -> f64 {
    let sl = lambda.sqrt();
    erfc((lambda - (1.0 + sl + eta_f * eta_f).sqrt()) / (2.0 * sl))
}

/// ECIT closed form in the formal overpotential, positive for oxidation:
/// (1 − c̃_s)·(c̃_s/(1 + e^(−η̃_f)) − θ/(1 + e^(η̃_f)))·erfc((λ̃ − √(1 + √λ̃ + η̃_f²))/(2√λ̃)).
pub fn ecit_rate(c_s: f64, theta: f64, eta_f: f64, lambda: f64) -> f64 {
    (1.0 - c_s) * (c_s * logistic(eta_f) - theta * logistic(-eta_f)) * ecit_cap(eta_f, lambda)
}

/// Open-circuit potential versus filling fraction, strictly decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct OcpCurve {
    interp: Pchip,
}

const BUNDLED_OCP: &str = include_str!("../data/nmc532_ocp.csv");

impl OcpCurve {
    pub fn new(filling: Vec<f64>, volts: Vec<f64>) -> Result<Self> {
        if volts.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(Error::invalid("ocp", "potential must decrease strictly with filling"));
        }
        if filling.first().is_some_and(|&x| x <= 0.0) || filling.last().is_some_and(|&x| x >= 1.0) {
            return Err(Error::invalid("ocp", "filling fractions must lie inside (0, 1)"));
        }
        let interp = Pchip::new(filling, volts)?;
        let (lo, hi) = interp.range();
        let samples = 20 * interp.knots().0.len();
        for i in 0..=samples {
            let x = lo + (hi - lo) * i as f64 / samples as f64;
            if !(interp.eval(x).1 < 0.0) {
                return Err(Error::invalid("ocp", format!("interpolated slope is not negative near x = {x:.4}")));
            }
        }
        Ok(OcpCurve { interp })
    }

    /// NMC532-like curve bundled with the crate, spanning [0.02, 0.98].
    pub fn nmc532() -> Self {
        Self::parse_csv(BUNDLED_OCP, "bundled OCP").expect("bundled OCP table is valid")
    }

    /// Reads a two-column CSV with header `x,ocv_volts`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse_csv(&text, &path.display().to_string())
    }

    pub fn parse_csv(text: &str, origin: &str) -> Result<Self> {
        let mut x = Vec::new();
        let mut y = Vec::new();
        let mut header_seen = false;
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |column: usize, message: String| Error::Parse {
                path: origin.to_string(),
                line: n + 1,
                column,
                message,
            };
            if !header_seen {
                let cols: Vec<&str> = line.split(',').map(str::trim).collect();
                if cols != ["x", "ocv_volts"] {
                    return Err(parse_err(1, format!("expected header `x,ocv_volts`, found `{line}`")));
                }
                header_seen = true;
                continue;
            }
            let mut fields = line.split(',');
            let (a, b) = match (fields.next(), fields.next(), fields.next()) {
                (Some(a), Some(b), None) => (a, b),
                _ => return Err(parse_err(1, "expected two columns".into())),
            };
            let xa: f64 = a.trim().parse().map_err(|_| parse_err(1, format!("not a number: `{a}`")))?;
            let yb: f64 = b
                .trim()
                .parse()
                .map_err(|_| parse_err(a.len() + 2, format!("not a number: `{b}`")))?;
            x.push(xa);
            y.push(yb);
        }
        Self::new(x, y)
    }

    pub fn range(&self) -> (f64, f64) {
        self.interp.range()
    }

    pub fn knots(&self) -> (&[f64], &[f64]) {
        self.interp.knots()
    }

    fn check(&self, c_s: f64) -> Result<()> {
        let (min, max) = self.range();
        if c_s >= min && c_s <= max {
            Ok(())
        } else {
            Err(Error::OutOfRange { value: c_s, min, max })
        }
    }

    /// Equilibrium potential in volts.
    pub fn ocp(&self, c_s: f64) -> Result<f64> {
        self.check(c_s)?;
        Ok(self.interp.eval(c_s).0)
    }

    /// dU/dc̃_s in volts per unit filling fraction.
    pub fn ocp_slope(&self, c_s: f64) -> Result<f64> {
        self.check(c_s)?;
        Ok(self.interp.eval(c_s).1)
    }

    /// Value and slope without a range check; the end cubics are extended outside.
    pub(crate) fn eval_unchecked(&self, c_s: f64) -> (f64, f64) {
        self.interp.eval(c_s)
    }

    /// Filling fraction at which the OCP equals `volts`.
    pub fn inverse(&self, volts: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let (v_hi, v_lo) = (self.interp.eval(lo).0, self.interp.eval(hi).0);
        if !(volts <= v_hi && volts >= v_lo) {
            return Err(Error::invalid(
                "voltage",
                format!("{volts} V outside the OCP range [{v_lo}, {v_hi}] V"),
            ));
        }
        bisect(|x| self.interp.eval(x).0 - volts, lo, hi, 1e-13)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ecit_closed_form_matches_high_precision_value() {
        let spec = KineticsSpec::nmc532();
        let KineticsModel::Ecit { lambda, .. } = spec.model else { unreachable!() };
        assert!((lambda - 4.281391894517).abs() < 1e-6);
        let theta = spec.adsorbed_fraction(1.0);
        assert!((theta - 0.41795117263183064).abs() < 1e-8);
        // 40-digit evaluation of the closed form at c̃_s = 0.5, η̃_f = −1.
        let want = -0.037557711364798361646;
        let got = ecit_rate(0.5, theta, -1.0, lambda);
        assert!(((got - want) / want).abs() < 1e-7, "{got}");
    }

    #[test]
    fn ecit_prefactor_values() {
        let spec = KineticsSpec::nmc532();
        for (c, f) in [(0.1, 0.0356), (0.3, 0.0481), (0.5, 0.04429), (0.9, 0.0119)] {
            assert!(((spec.linearize(c, 1.0) - f) / f).abs() < 0.01, "{c}");
        }
    }

    #[test]
    fn bv_constant_prefactor_is_one() {
        let spec = KineticsSpec {
            j0: 1.0,
            model: KineticsModel::ButlerVolmer { alpha: 0.5, exchange: ExchangeForm::Constant },
        };
        assert_eq!(spec.linearize(0.3, 1.0), 1.0);
        let j = spec.current_density(0.3, 1.0, 0.7);
        assert!((j + spec.current_density(0.3, 1.0, -0.7)).abs() < 1e-15);
    }

    #[test]
    fn saturated_filling_gives_zero_current() {
        let spec = KineticsSpec::nmc532();
        assert_eq!(spec.current_density(0.0, 1.0, -3.0), 0.0);
        assert_eq!(spec.current_density(1.0, 1.0, -3.0), 0.0);
        assert!(spec.linearize(1.0 - 1e-9, 1.0) < 1e-8);
    }

    #[test]
    fn invalid_lambda_is_rejected() {
        let mut spec = KineticsSpec::nmc532();
        spec.model = KineticsModel::Ecit { lambda: 0.0, w_ads: 1.0, a_plus: 1.0 };
        assert!(spec.validate().unwrap_err().to_string().contains("lambda"));
    }

    #[test]
    fn bundled_ocp_is_decreasing_and_invertible() {
        let ocp = OcpCurve::nmc532();
        assert_eq!(ocp.range(), (0.02, 0.98));
        let v = ocp.ocp(0.5).unwrap();
        assert!((v - 3.85).abs() < 1e-9);
        assert!((ocp.inverse(v).unwrap() - 0.5).abs() < 1e-10);
        assert!(matches!(ocp.ocp(0.99), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn malformed_ocp_reports_line() {
        let err = OcpCurve::parse_csv("x,ocv_volts\n0.1,4.0\n0.2,abc\n", "t.csv").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
    }
}
