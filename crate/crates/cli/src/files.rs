//! Reading the text formats from disk.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use ndasm_core::proof::Derivation;
use ndasm_core::semantics::check_state_signature;
use ndasm_core::syntax::{parse_derivation, parse_lformula, parse_machine, parse_state, FormulaFile, Machine};
use ndasm_core::{Error, State};

/// Failure of a command, split by exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Unreadable or ill-formed input: exit 2.
    Input(String),
    /// A configured cap was hit: exit 3.
    Limit(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Limit(_) => 3,
        }
    }

    pub fn at(path: &Path, e: Error) -> CliError {
        match e {
            Error::ResourceLimit(m) => CliError::Limit(format!("{}: resource limit exceeded: {m}", path.display())),
            e => CliError::Input(format!("{}: {e}", path.display())),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Limit(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ResourceLimit(m) => CliError::Limit(format!("resource limit exceeded: {m}")),
            e => CliError::Input(e.to_string()),
        }
    }
}

pub fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

pub fn load_machine(path: &Path) -> Result<Machine, CliError> {
    parse_machine(&read(path)?).map_err(|e| CliError::at(path, e))
}

pub fn load_state(path: &Path) -> Result<State, CliError> {
    parse_state(&read(path)?).map_err(|e| CliError::at(path, e))
}

pub fn load_formulas(path: &Path) -> Result<FormulaFile, CliError> {
    parse_lformula(&read(path)?).map_err(|e| CliError::at(path, e))
}

pub fn load_derivation(path: &Path) -> Result<Derivation, CliError> {
    parse_derivation(&read(path)?).map_err(|e| CliError::at(path, e))
}

/// A machine and a start state over the same signature.
pub fn load_instance(machine: &Path, state: &Path) -> Result<(Machine, State), CliError> {
    let m = load_machine(machine)?;
    let s = load_state(state)?;
    check_state_signature(&m, &s).map_err(|e| CliError::at(state, e))?;
    Ok((m, s))
}

/// Certificate state files, named relative to the derivation's directory
/// and parsed once each.
pub struct CertificateStates {
    base: PathBuf,
    cache: BTreeMap<String, Vec<State>>,
}

impl CertificateStates {
    pub fn beside(derivation: &Path) -> Self {
        let base = derivation.parent().map(Path::to_path_buf).unwrap_or_default();
        CertificateStates { base, cache: BTreeMap::new() }
    }

    pub fn get(&mut self, name: &str) -> Result<Vec<State>, String> {
        if let Some(s) = self.cache.get(name) {
            return Ok(s.clone());
        }
        let path = self.base.join(name);
        let src = fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
        let s = parse_state(&src).map_err(|e| format!("{}: {e}", path.display()))?;
        self.cache.insert(name.to_string(), vec![s.clone()]);
        Ok(vec![s])
    }
}
