//! JSON state specifications.

use num_complex::Complex64 as C64;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::fock::{
    make_basis_state, make_coherent_product, make_ghz_like, make_two_mode_squeezed, random_state, DenseState,
    ModeSpec, StateKind,
};
use crate::modeset::ModeSet;
use crate::operator::MomentSource;
use crate::structured::{make_cat_family, make_number_cat, PrimitiveKet, StructuredState};

/// One constructor call, selected by the `type` field. Dense states take
/// `cutoff` and `headroom`; `"structured": true` selects the exact
/// superposition representation where the family has one.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpecDocument {
    Basis {
        occupations: Vec<usize>,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
    Ghz {
        n: usize,
        #[serde(default = "unit")]
        phase: C64,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
    Coherent {
        alphas: Vec<C64>,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
    Tmsv {
        r: f64,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
    Cat {
        n: usize,
        alpha: C64,
        #[serde(default = "plus")]
        sign: i8,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
    /// `(|x⟩ + phase·|x̄⟩)/√2` with ones on `ones`; structured only.
    NumberCat {
        n: usize,
        ones: ModeSet,
        #[serde(default = "unit")]
        phase: C64,
        #[serde(default)]
        structured: bool,
    },
    Random {
        n: usize,
        kind: StateKind,
        seed: u64,
        cutoff: Option<usize>,
        headroom: Option<usize>,
        #[serde(default)]
        structured: bool,
    },
}

fn unit() -> C64 {
    C64::new(1.0, 0.0)
}

fn plus() -> i8 {
    1
}

#[derive(Debug, Clone)]
pub enum State {
    Dense(DenseState),
    Structured(StructuredState),
}

impl State {
    pub fn source(&self) -> &(dyn MomentSource + Sync) {
        match self {
            State::Dense(d) => d,
            State::Structured(s) => s,
        }
    }

    pub fn n_modes(&self) -> usize {
        self.source().n_modes()
    }
}

/// Problems in the document itself, as opposed to physics-domain failures
/// raised by the constructors.
#[derive(Debug)]
pub enum SpecError {
    Malformed(String),
    Physics(Error),
}

impl From<Error> for SpecError {
    fn from(e: Error) -> Self {
        SpecError::Physics(e)
    }
}

impl std::fmt::Display for SpecError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpecError::Malformed(m) => write!(f, "{m}"),
            SpecError::Physics(e) => write!(f, "{e}"),
        }
    }
}

fn malformed<T>(msg: impl Into<String>) -> std::result::Result<T, SpecError> {
    Err(SpecError::Malformed(msg.into()))
}

fn dense_only(family: &str, structured: bool) -> std::result::Result<(), SpecError> {
    if structured {
        return malformed(format!("{family} states have no structured representation"));
    }
    Ok(())
}

fn need(field: &str, family: &str, v: Option<usize>) -> std::result::Result<usize, SpecError> {
    v.ok_or_else(|| SpecError::Malformed(format!("{family} state needs \"{field}\"")))
}

fn no_dense_fields(cutoff: Option<usize>, headroom: Option<usize>) -> std::result::Result<(), SpecError> {
    if cutoff.is_some() || headroom.is_some() {
        return malformed("\"cutoff\"/\"headroom\" do not apply to a structured state");
    }
    Ok(())
}

/// Dense states whose headroom is fixed by the occupations accept a
/// `headroom` only as a lower bound to be checked.
fn check_headroom(state: DenseState, requested: Option<usize>) -> Result<DenseState> {
    match requested {
        Some(h) if h > state.headroom() => Err(Error::Headroom {
            mode: 0,
            needed: h,
            available: state.headroom(),
        }),
        _ => Ok(state),
    }
}

impl StateSpecDocument {
    pub fn parse(text: &str) -> std::result::Result<Self, SpecError> {
        serde_json::from_str(text).map_err(|e| SpecError::Malformed(format!("state spec: {e}")))
    }

    pub fn build(&self) -> std::result::Result<State, SpecError> {
        use StateSpecDocument::*;
        Ok(match self {
            Basis {
                occupations,
                cutoff,
                headroom,
                structured,
            } => {
                if *structured {
                    no_dense_fields(*cutoff, *headroom)?;
                    let kets = occupations.iter().map(|&o| PrimitiveKet::Number(o)).collect();
                    State::Structured(StructuredState::new(vec![(unit(), kets)])?)
                } else {
                    let spec = ModeSpec::new(occupations.len(), need("cutoff", "basis", *cutoff)?)?;
                    State::Dense(check_headroom(make_basis_state(spec, occupations)?, *headroom)?)
                }
            }
            Ghz {
                n,
                phase,
                cutoff,
                headroom,
                structured,
            } => {
                if *structured {
                    no_dense_fields(*cutoff, *headroom)?;
                    State::Structured(make_number_cat(*n, ModeSet::empty(), *phase)?)
                } else {
                    let spec = ModeSpec::new(*n, need("cutoff", "ghz", *cutoff)?)?;
                    State::Dense(check_headroom(make_ghz_like(spec, *phase)?, *headroom)?)
                }
            }
            Coherent {
                alphas,
                cutoff,
                headroom,
                structured,
            } => {
                if *structured {
                    no_dense_fields(*cutoff, *headroom)?;
                    let kets = alphas.iter().map(|&a| PrimitiveKet::Coherent(a)).collect();
                    State::Structured(StructuredState::new(vec![(unit(), kets)])?)
                } else {
                    let spec = ModeSpec::new(alphas.len(), need("cutoff", "coherent", *cutoff)?)?;
                    let h = need("headroom", "coherent", *headroom)?;
                    State::Dense(make_coherent_product(spec, alphas, h)?)
                }
            }
            Tmsv {
                r,
                cutoff,
                headroom,
                structured,
            } => {
                dense_only("tmsv", *structured)?;
                let spec = ModeSpec::new(2, need("cutoff", "tmsv", *cutoff)?)?;
                State::Dense(make_two_mode_squeezed(spec, *r, need("headroom", "tmsv", *headroom)?)?)
            }
            Cat {
                n,
                alpha,
                sign,
                cutoff,
                headroom,
                structured,
            } => {
                let st = make_cat_family(*n, *alpha, *sign)?;
                if *structured {
                    no_dense_fields(*cutoff, *headroom)?;
                    State::Structured(st)
                } else {
                    let spec = ModeSpec::new(*n, need("cutoff", "cat", *cutoff)?)?;
                    State::Dense(st.to_dense(spec, need("headroom", "cat", *headroom)?)?)
                }
            }
            NumberCat {
                n,
                ones,
                phase,
                structured,
            } => {
                if !structured {
                    return malformed("number_cat states need \"structured\": true");
                }
                State::Structured(make_number_cat(*n, *ones, *phase)?)
            }
            Random {
                n,
                kind,
                seed,
                cutoff,
                headroom,
                structured,
            } => {
                dense_only("random", *structured)?;
                let spec = ModeSpec::new(*n, need("cutoff", "random", *cutoff)?)?;
                State::Dense(random_state(spec, *kind, need("headroom", "random", *headroom)?, *seed)?)
            }
        })
    }
}
