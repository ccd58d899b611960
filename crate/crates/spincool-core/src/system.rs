//! Spin-system description: named spins with equilibrium biases, T1 times and roles.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::state::BiasVector;

/// Whether a spin is rapidly relaxing and used to dump entropy, or retains polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Role {
    Reset,
    Computation,
}

/// Spin-lattice relaxation time in seconds; `+∞` means the spin never relaxes.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct T1(f64);

impl T1 {
    pub const INFINITE: T1 = T1(f64::INFINITY);

    pub fn seconds(s: f64) -> Result<Self> {
        if s > 0.0 {
            Ok(T1(s))
        } else {
            Err(Error::InvalidParameter(format!("T1 must be positive, got {s}")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Surviving fraction `e^(−t/T1)` of a deviation from equilibrium after `t` seconds.
    pub fn survival(self, t: f64) -> f64 {
        if self.is_infinite() {
            1.0
        } else {
            libm::exp(-t / self.0)
        }
    }
}

/// One spin of a [`SpinSystem`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpinDef {
    pub name: String,
    /// Equilibrium bias in units of the system's reference bias.
    pub eq_bias: f64,
    #[cfg_attr(feature = "serde", serde(rename = "t1_seconds"))]
    pub t1: T1,
    pub role: Role,
    /// One-sigma uncertainty of `eq_bias`.
    #[cfg_attr(feature = "serde", serde(default))]
    pub eq_bias_err: f64,
    /// One-sigma uncertainty of `t1` in seconds.
    #[cfg_attr(feature = "serde", serde(default, rename = "t1_err_seconds"))]
    pub t1_err: f64,
    /// Larmor frequency, kept as metadata.
    #[cfg_attr(
        feature = "serde",
        serde(default, skip_serializing_if = "Option::is_none")
    )]
    pub frequency_hz: Option<f64>,
}

impl SpinDef {
    pub fn new(name: impl Into<String>, eq_bias: f64, t1: T1, role: Role) -> Self {
        Self {
            name: name.into(),
            eq_bias,
            t1,
            role,
            eq_bias_err: 0.0,
            t1_err: 0.0,
            frequency_hz: None,
        }
    }

    pub fn with_errors(mut self, eq_bias_err: f64, t1_err: f64) -> Self {
        self.eq_bias_err = eq_bias_err;
        self.t1_err = t1_err;
        self
    }

    pub fn with_frequency(mut self, hz: f64) -> Self {
        self.frequency_hz = Some(hz);
        self
    }
}

/// Scalar coupling between two named spins. Metadata only; never simulated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Coupling {
    pub spins: [String; 2],
    pub hz: f64,
}

/// A molecule's relevant spins plus the bath they equilibrate with.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "SpinSystemRepr", into = "SpinSystemRepr"))]
pub struct SpinSystem {
    spins: Vec<SpinDef>,
    reference_bias: f64,
    temperature: f64,
    couplings: Vec<Coupling>,
}

#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
struct SpinSystemRepr {
    reference_bias: f64,
    temperature_kelvin: f64,
    spins: Vec<SpinDef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    couplings: Vec<Coupling>,
}

#[cfg(feature = "serde")]
impl TryFrom<SpinSystemRepr> for SpinSystem {
    type Error = Error;

    fn try_from(r: SpinSystemRepr) -> Result<Self> {
        SpinSystem::new(r.spins, r.reference_bias, r.temperature_kelvin)?.with_couplings(r.couplings)
    }
}

#[cfg(feature = "serde")]
impl From<SpinSystem> for SpinSystemRepr {
    fn from(s: SpinSystem) -> Self {
        SpinSystemRepr {
            reference_bias: s.reference_bias,
            temperature_kelvin: s.temperature,
            spins: s.spins,
            couplings: s.couplings,
        }
    }
}

impl SpinSystem {
    pub fn new(spins: Vec<SpinDef>, reference_bias: f64, temperature: f64) -> Result<Self> {
        if spins.is_empty() {
            return Err(Error::InvalidSystem("at least one spin is required".into()));
        }
        if !(reference_bias > 0.0 && reference_bias < 1.0) {
            return Err(Error::InvalidSystem(format!(
                "reference bias must lie in (0, 1), got {reference_bias}"
            )));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidSystem(format!(
                "temperature must be positive, got {temperature}"
            )));
        }
        for (i, s) in spins.iter().enumerate() {
            if spins[..i].iter().any(|o| o.name == s.name) {
                return Err(Error::InvalidSystem(format!("duplicate spin name {:?}", s.name)));
            }
            if !(s.eq_bias > 0.0) || !(s.eq_bias * reference_bias < 1.0) {
                return Err(Error::InvalidSystem(format!(
                    "spin {:?}: equilibrium bias {} invalid for reference bias {reference_bias}",
                    s.name, s.eq_bias
                )));
            }
            if !(s.t1.value() > 0.0) {
                return Err(Error::InvalidSystem(format!(
                    "spin {:?}: T1 must be positive or infinite",
                    s.name
                )));
            }
            if !(s.eq_bias_err >= 0.0 && s.t1_err >= 0.0) {
                return Err(Error::InvalidSystem(format!(
                    "spin {:?}: uncertainties must be non-negative",
                    s.name
                )));
            }
        }
        Ok(Self {
            spins,
            reference_bias,
            temperature,
            couplings: Vec::new(),
        })
    }

    pub fn with_couplings(mut self, couplings: Vec<Coupling>) -> Result<Self> {
        for c in &couplings {
            for name in &c.spins {
                self.index_of(name)?;
            }
        }
        self.couplings = couplings;
        Ok(self)
    }

    /// Trichloroethylene with two labeled carbons, in the order (C1, C2, H).
    ///
    /// T1 = 43 ± 4 s, 20 ± 2 s and 3.5 ± 0.1 s; equilibrium biases
    /// 1.000 ± 0.003, 1.000 ± 0.003 and 3.98 ± 0.01 at 296 K with
    /// `ε₀ = 1.020e−5`.
    pub fn tce() -> Self {
        let spins = alloc::vec![
            SpinDef::new("C1", 1.000, T1(43.0), Role::Computation)
                .with_errors(0.003, 4.0)
                .with_frequency(125.773354e6),
            SpinDef::new("C2", 1.000, T1(20.0), Role::Computation)
                .with_errors(0.003, 2.0)
                .with_frequency(125.772450e6),
            SpinDef::new("H", 3.98, T1(3.5), Role::Reset)
                .with_errors(0.01, 0.1)
                .with_frequency(500.133245e6),
        ];
        let couplings = alloc::vec![
            coupling("C2", "H", 201.0),
            coupling("C1", "C2", 103.0),
            coupling("C1", "H", 9.0),
        ];
        SpinSystem::new(spins, 1.020e-5, 296.0)
            .and_then(|s| s.with_couplings(couplings))
            .expect("built-in system is valid")
    }

    /// TCE with infinitely slow carbons and the idealized `{1, 1, 4}` biases.
    pub fn tce_ideal() -> Self {
        let mut s = Self::tce();
        s.spins[0].t1 = T1::INFINITE;
        s.spins[1].t1 = T1::INFINITE;
        s.spins[2].eq_bias = 4.0;
        for spin in &mut s.spins {
            spin.eq_bias_err = 0.0;
            spin.t1_err = 0.0;
        }
        s
    }

    pub fn n_spins(&self) -> usize {
        self.spins.len()
    }

    pub fn spins(&self) -> &[SpinDef] {
        &self.spins
    }

    pub fn spin(&self, i: usize) -> Result<&SpinDef> {
        self.spins.get(i).ok_or(Error::IndexOutOfRange {
            index: i,
            n: self.spins.len(),
        })
    }

    pub fn reference_bias(&self) -> f64 {
        self.reference_bias
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn couplings(&self) -> &[Coupling] {
        &self.couplings
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.spins
            .iter()
            .position(|s| s.name == name)
            .ok_or_else(|| Error::InvalidSystem(format!("no spin named {name:?}")))
    }

    pub fn names(&self) -> Vec<String> {
        self.spins.iter().map(|s| s.name.to_string()).collect()
    }

    /// Equilibrium biases in normalized units.
    pub fn equilibrium(&self) -> BiasVector {
        BiasVector::new(self.spins.iter().map(|s| s.eq_bias).collect())
    }

    pub fn indices_with_role(&self, role: Role) -> Vec<usize> {
        (0..self.spins.len())
            .filter(|&i| self.spins[i].role == role)
            .collect()
    }

    /// Replaces the equilibrium bias of spin `i`. Used to perturb parameters.
    pub fn set_eq_bias(&mut self, i: usize, eq_bias: f64) -> Result<()> {
        self.spin(i)?;
        if !(eq_bias > 0.0 && eq_bias * self.reference_bias < 1.0) {
            return Err(Error::InvalidSystem(format!("equilibrium bias {eq_bias} invalid")));
        }
        self.spins[i].eq_bias = eq_bias;
        Ok(())
    }

    pub fn set_t1(&mut self, i: usize, t1: T1) -> Result<()> {
        self.spin(i)?;
        self.spins[i].t1 = t1;
        Ok(())
    }
}

fn coupling(a: &str, b: &str, hz: f64) -> Coupling {
    Coupling {
        spins: [a.into(), b.into()],
        hz,
    }
}
