use crate::scaling::DimensionlessGroups;
use crate::{Error, Result};

const SERIES_THRESHOLD: f64 = 1e-3;

/// Steady overpotential profile η̃(x̃) of the lean model,
///
/// η̃(x̃) = [(⟨η̃⟩Λ² + r)·cosh(Λ(x̃−1)) − r·cosh(Λx̃)] / (Λ sinh Λ),
///
/// with mean ⟨η̃⟩, wavenumber Λ and collector slope η̃′(1) = −r.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OverpotentialProfile {
    pub lambda: f64,
    pub mean: f64,
    pub r: f64,
}

impl OverpotentialProfile {
    pub fn new(lambda: f64, mean: f64, r: f64) -> Self {
        OverpotentialProfile { lambda, mean, r }
    }

    /// Galvanostatic profile: Λ = √(Da_w f), ⟨η̃⟩ = −1/(Da_p f), r = Da_w,σ/Da_p.
    pub fn from_groups(groups: &DimensionlessGroups, f: f64) -> Result<Self> {
        if !(groups.da_p * f > 0.0) || !f.is_finite() {
            return Err(Error::invalid("f", format!("Da_p·f must be positive, got Da_p = {}, f = {f}", groups.da_p)));
        }
        Ok(OverpotentialProfile {
            lambda: (groups.da_w * f).sqrt(),
            mean: -1.0 / (groups.da_p * f),
            r: groups.da_w_sigma / groups.da_p,
        })
    }

    pub fn eta(&self, x: f64) -> f64 {
        let (l, m, r) = (self.lambda, self.mean, self.r);
        let u = x - 0.5;
        if l < SERIES_THRESHOLD {
            let l2 = l * l;
            return m * (1.0 + l2 * (0.5 * (x - 1.0).powi(2) - 1.0 / 6.0)) - r * (u + l2 * (u.powi(3) / 6.0 - u / 8.0));
        }
        // Λcosh(Λ(x−1))/sinhΛ and sinh(Λ(x−½))/(Λcosh(Λ/2)) in exp-scaled form.
        let even = l * ((l * (x - 2.0)).exp() + (-l * x).exp()) / -(-2.0 * l).exp_m1();
        let odd = ((l * (x - 1.0)).exp() - (-l * x).exp()) / (1.0 + (-l).exp()) / l;
        m * even - r * odd
    }

    pub fn slope(&self, x: f64) -> f64 {
        let (l, m, r) = (self.lambda, self.mean, self.r);
        let u = x - 0.5;
        if l < SERIES_THRESHOLD {
            let l2 = l * l;
            return m * l2 * (x - 1.0) - r * (1.0 + l2 * (0.5 * u * u - 0.125));
        }
        let odd = ((l * (x - 2.0)).exp() - (-l * x).exp()) / -(-2.0 * l).exp_m1();
        let even = ((l * (x - 1.0)).exp() + (-l * x).exp()) / (1.0 + (-l).exp());
        m * l * l * odd - r * even
    }

    pub fn samples(&self, n: usize) -> Vec<f64> {
        crate::numerics::linspace(0.0, 1.0, n).into_iter().map(|x| self.eta(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_cosh(p: &OverpotentialProfile, x: f64) -> f64 {
        let l = p.lambda;
        ((p.mean * l * l + p.r) * (l * (x - 1.0)).cosh() - p.r * (l * x).cosh()) / (l * l.sinh())
    }

    #[test]
    fn matches_printed_two_cosh_form() {
        for &l in &[2e-2, 0.3, 1.0, 7.0, 25.0] {
            let p = OverpotentialProfile::new(l, -0.7, 1.3);
            for &x in &[0.0, 0.2, 0.5, 0.9, 1.0] {
                let want = two_cosh(&p, x);
                assert!((p.eta(x) - want).abs() < 1e-9 * want.abs().max(1.0), "Λ={l} x={x}");
            }
        }
    }

    #[test]
    fn series_and_closed_form_agree_at_threshold() {
        let below = OverpotentialProfile::new(SERIES_THRESHOLD * (1.0 - 1e-12), -2.0, 0.5);
        let above = OverpotentialProfile::new(SERIES_THRESHOLD * (1.0 + 1e-12), -2.0, 0.5);
        for &x in &[0.0, 0.3, 1.0] {
            assert!((below.eta(x) - above.eta(x)).abs() < 1e-12);
            assert!((below.slope(x) - above.slope(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn large_wavenumber_stays_finite() {
        let p = OverpotentialProfile::new(800.0, -1.0, 2.0);
        assert!(p.eta(0.0).is_finite() && p.eta(1.0).is_finite() && p.slope(0.5).is_finite());
    }
}
