use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::SvrError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Rbf,
    Sigmoid,
}

impl KernelKind {
    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Linear => "linear",
            KernelKind::Rbf => "rbf",
            KernelKind::Sigmoid => "sigmoid",
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelKind {
    type Err = SvrError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelKind::Linear),
            "rbf" => Ok(KernelKind::Rbf),
            "sigmoid" => Ok(KernelKind::Sigmoid),
            other => Err(SvrError::InvalidConfig(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Kernel choice with its coefficients. `gamma` is ignored by the linear
/// kernel and `coef0` is used only by the sigmoid kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub kind: KernelKind,
    pub gamma: f64,
    pub coef0: f64,
}

impl KernelSpec {
    pub fn linear() -> Self {
        Self {
            kind: KernelKind::Linear,
            gamma: 1.0,
            coef0: 0.0,
        }
    }

    pub fn rbf(gamma: f64) -> Self {
        Self {
            kind: KernelKind::Rbf,
            gamma,
            coef0: 0.0,
        }
    }

    pub fn sigmoid(gamma: f64, coef0: f64) -> Self {
        Self {
            kind: KernelKind::Sigmoid,
            gamma,
            coef0,
        }
    }

    pub fn validate(&self) -> Result<(), SvrError> {
        let needs_gamma = matches!(self.kind, KernelKind::Rbf | KernelKind::Sigmoid);
        if needs_gamma && !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(SvrError::InvalidConfig(format!(
                "{} kernel needs gamma > 0, got {}",
                self.kind, self.gamma
            )));
        }
        if !self.coef0.is_finite() {
            return Err(SvrError::InvalidConfig("coef0 must be finite".into()));
        }
        Ok(())
    }

    /// Evaluates without checking dimensions.
    pub(crate) fn apply(&self, x: &[f64], z: &[f64]) -> f64 {
        match self.kind {
            KernelKind::Linear => dot(x, z),
            KernelKind::Rbf => {
                let d2: f64 = x.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum();
                (-self.gamma * d2).exp()
            }
            KernelKind::Sigmoid => (self.gamma * dot(x, z) + self.coef0).tanh(),
        }
    }
}

fn dot(x: &[f64], z: &[f64]) -> f64 {
    x.iter().zip(z).map(|(a, b)| a * b).sum()
}

pub fn kernel_eval(spec: &KernelSpec, x: &[f64], z: &[f64]) -> Result<f64, SvrError> {
    if x.len() != z.len() {
        return Err(SvrError::DimensionMismatch(x.len(), z.len()));
    }
    Ok(spec.apply(x, z))
}

/// Dense symmetric Gram matrix, row-major.
pub(crate) fn gram(spec: &KernelSpec, xs: &[Vec<f64>]) -> Vec<f64> {
    let n = xs.len();
    let mut k = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = spec.apply(&xs[i], &xs[j]);
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let x = [0.3, -1.2, 4.0];
        for g in [0.001, 0.5, 3.0] {
            assert_eq!(kernel_eval(&KernelSpec::rbf(g), &x, &x).unwrap(), 1.0);
        }
        assert_eq!(
            kernel_eval(&KernelSpec::sigmoid(0.7, 0.0), &[1.0, 0.0], &[0.0, 2.0]).unwrap(),
            0.0
        );
        // ||x - z||^2 = 1 + 9 = 10
        let v = kernel_eval(&KernelSpec::rbf(0.1), &[0.0, 0.0], &[1.0, 3.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-15);
        assert!((v - 0.367879).abs() < 1e-6);
        assert_eq!(
            kernel_eval(&KernelSpec::linear(), &[1.0, 2.0], &[3.0, 4.0]).unwrap(),
            11.0
        );
        assert_eq!(
            kernel_eval(&KernelSpec::linear(), &[1.0], &[3.0, 4.0]),
            Err(SvrError::DimensionMismatch(1, 2))
        );
    }

    #[test]
    fn gamma_validation() {
        assert!(KernelSpec::rbf(0.0).validate().is_err());
        assert!(KernelSpec::sigmoid(-1.0, 0.0).validate().is_err());
        let mut lin = KernelSpec::linear();
        lin.gamma = -3.0;
        assert!(lin.validate().is_ok());
    }

    #[test]
    fn parse_names() {
        assert_eq!("RBF".parse::<KernelKind>().unwrap(), KernelKind::Rbf);
        assert!("poly".parse::<KernelKind>().is_err());
    }
}
