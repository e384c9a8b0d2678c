//! Problem parameters and their qualitative classification.

use crate::error::{Error, Result};
use crate::kernel::KernelGeometry;

/// Covariance, drift, reflection and starting point of a reflected Brownian
/// motion in the quadrant. The reflection matrix has unit diagonal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub sigma11: f64,
    pub sigma12: f64,
    pub sigma22: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub r12: f64,
    pub r21: f64,
    pub x1: f64,
    pub x2: f64,
}

impl ModelParams {
    /// Builds and checks a parameter set.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        sigma11: f64,
        sigma12: f64,
        sigma22: f64,
        mu1: f64,
        mu2: f64,
        r12: f64,
        r21: f64,
        x1: f64,
        x2: f64,
    ) -> Result<Self> {
        let p = Self { sigma11, sigma12, sigma22, mu1, mu2, r12, r21, x1, x2 };
        p.check()?;
        Ok(p)
    }

    /// Identity covariance and reflection, unit drift, start at (1, 1).
    pub fn canonical() -> Self {
        Self {
            sigma11: 1.0,
            sigma12: 0.0,
            sigma22: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            r12: 0.0,
            r21: 0.0,
            x1: 1.0,
            x2: 1.0,
        }
    }

    /// Rejects non-finite entries, a covariance that is not positive
    /// definite, and starting points outside the quadrant.
    pub fn check(&self) -> Result<()> {
        let all = [
            self.sigma11, self.sigma12, self.sigma22, self.mu1, self.mu2, self.r12, self.r21,
            self.x1, self.x2,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("non-finite entry".into()));
        }
        if self.sigma11 <= 0.0 || self.sigma22 <= 0.0 || self.det_sigma() <= 0.0 {
            return Err(Error::Parameter("covariance is not positive definite".into()));
        }
        if self.x1 < 0.0 || self.x2 < 0.0 {
            return Err(Error::Parameter("starting point outside the quadrant".into()));
        }
        Ok(())
    }

    pub fn det_sigma(&self) -> f64 {
        self.sigma11 * self.sigma22 - self.sigma12 * self.sigma12
    }

    /// The same process with the coordinates exchanged. Boundary quantities
    /// of face 2 are those of face 1 for the swapped model.
    pub fn swapped(&self) -> Self {
        Self {
            sigma11: self.sigma22,
            sigma12: self.sigma12,
            sigma22: self.sigma11,
            mu1: self.mu2,
            mu2: self.mu1,
            r12: self.r21,
            r21: self.r12,
            x1: self.x2,
            x2: self.x1,
        }
    }

    /// Same model started from another point.
    pub fn with_start(&self, x1: f64, x2: f64) -> Self {
        Self { x1, x2, ..*self }
    }
}

/// Outcome of the existence test together with the diagnostics that audit
/// the reading of the condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExistenceReport {
    /// `r12 > 0 || r21 > 0 || r12 * r21 < 1`.
    pub exists: bool,
    /// `r12 > 0 && r21 > 0 && r12 * r21 < 1`, kept for comparison only.
    pub conjunctive: bool,
    /// The two readings give different answers.
    pub disagrees_with_conjunctive: bool,
    /// `r12 * r21 >= 1` with a negative off-diagonal entry.
    pub borderline: bool,
}

pub fn existence_report(p: &ModelParams) -> Result<ExistenceReport> {
    p.check()?;
    let prod = p.r12 * p.r21;
    let exists = p.r12 > 0.0 || p.r21 > 0.0 || prod < 1.0;
    let conjunctive = p.r12 > 0.0 && p.r21 > 0.0 && prod < 1.0;
    Ok(ExistenceReport {
        exists,
        conjunctive,
        disagrees_with_conjunctive: exists != conjunctive,
        borderline: prod >= 1.0 && (p.r12 < 0.0 || p.r21 < 0.0),
    })
}

/// Whether the process exists for these parameters.
pub fn validate_existence(p: &ModelParams) -> Result<bool> {
    existence_report(p).map(|r| r.exists)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Transient,
    PositiveRecurrent,
    NullRecurrent,
}

/// Signs of the drift components: P for positive, N for non-positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriftSignCase {
    PP,
    PN,
    NP,
    NN,
}

impl DriftSignCase {
    pub fn of(p: &ModelParams) -> Self {
        match (p.mu1 > 0.0, p.mu2 > 0.0) {
            (true, true) => Self::PP,
            (true, false) => Self::PN,
            (false, true) => Self::NP,
            (false, false) => Self::NN,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub exists: bool,
    /// `None` when the process does not exist.
    pub regime: Option<Regime>,
    pub drift_sign_case: DriftSignCase,
}

fn neg_part(v: f64) -> f64 {
    (-v).max(0.0)
}

/// Existence and recurrence classification. Thresholds are compared exactly.
pub fn classify(p: &ModelParams) -> Result<Classification> {
    let exists = validate_existence(p)?;
    let drift_sign_case = DriftSignCase::of(p);
    let regime = exists.then(|| {
        let a = p.mu1 + p.r12 * neg_part(p.mu2);
        let b = p.mu2 + p.r21 * neg_part(p.mu1);
        if a > 0.0 || b > 0.0 {
            Regime::Transient
        } else if a < 0.0 && b < 0.0 {
            Regime::PositiveRecurrent
        } else {
            Regime::NullRecurrent
        }
    });
    Ok(Classification { exists, regime, drift_sign_case })
}

/// Upper bounds on the real parts where the transforms are finite.
/// A `*_closed` flag tells whether the bound itself is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceDomain {
    pub psi1_max_re: f64,
    pub psi1_closed: bool,
    pub psi2_max_re: f64,
    pub psi2_closed: bool,
    /// Strict componentwise bounds for the interior transform.
    pub psi_box: (f64, f64),
}

impl ConvergenceDomain {
    pub fn psi_contains(&self, re1: f64, re2: f64) -> bool {
        re1 < self.psi_box.0 && re2 < self.psi_box.1
    }
}

pub fn convergence_domain(p: &ModelParams, k: &KernelGeometry) -> Result<ConvergenceDomain> {
    let c = classify(p)?;
    if c.regime != Some(Regime::Transient) {
        return Err(Error::NotTransient);
    }
    let ts1 = k.theta_star.0;
    let tss2 = k.theta_star_star.1;
    let d = match c.drift_sign_case {
        DriftSignCase::PP => ConvergenceDomain {
            psi1_max_re: tss2,
            psi1_closed: true,
            psi2_max_re: ts1,
            psi2_closed: true,
            psi_box: (ts1.min(0.0), tss2.min(0.0)),
        },
        DriftSignCase::PN => ConvergenceDomain {
            psi1_max_re: tss2.min(0.0),
            psi1_closed: true,
            psi2_max_re: 0.0,
            psi2_closed: false,
            psi_box: (0.0, tss2.min(0.0)),
        },
        DriftSignCase::NP => ConvergenceDomain {
            psi1_max_re: 0.0,
            psi1_closed: false,
            psi2_max_re: ts1.min(0.0),
            psi2_closed: true,
            psi_box: (ts1.min(0.0), 0.0),
        },
        DriftSignCase::NN => ConvergenceDomain {
            psi1_max_re: 0.0,
            psi1_closed: false,
            psi2_max_re: 0.0,
            psi2_closed: false,
            psi_box: (0.0, 0.0),
        },
    };
    Ok(d)
}
