//! Parse, validate and register every definition of a program in order.

use std::fmt;

use crate::codec::CodecConfig;
use crate::countability::PairingScheme;
use crate::registry::{cardinality_of, register_compiled, Cardinality, Registry, RegistryError};
use crate::syntax::{
    normtype_of, parse_program, scope_for, ConstrsType, ParseError, Program, TypeExpr, ValidationError,
};

#[derive(Clone, Debug)]
pub struct CompiledType {
    pub config: CodecConfig,
    pub cardinality: Cardinality,
}

impl CompiledType {
    pub fn constrs(&self) -> &ConstrsType {
        self.config.constrs()
    }

    pub fn normtype(&self) -> TypeExpr {
        normtype_of(self.constrs(), &TypeExpr::X)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DefError {
    #[error("{}", join_errors(.0))]
    Invalid(Vec<ValidationError>),
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

fn join_errors(errors: &[ValidationError]) -> String {
    errors.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

/// Result of compiling a program: one outcome per definition, in
/// declaration order, plus the registry extended with every valid one.
#[derive(Clone, Debug)]
pub struct Compilation {
    pub program: Program,
    pub outcomes: Vec<(String, Result<CompiledType, DefError>)>,
    pub registry: Registry,
}

impl Compilation {
    pub fn is_ok(&self) -> bool {
        self.outcomes.iter().all(|(_, r)| r.is_ok())
    }

    pub fn get(&self, type_name: &str) -> Option<&Result<CompiledType, DefError>> {
        self.outcomes.iter().find(|(n, _)| n == type_name).map(|(_, r)| r)
    }

    pub fn errors(&self) -> impl Iterator<Item = (&str, &DefError)> {
        self.outcomes.iter().filter_map(|(n, r)| r.as_ref().err().map(|e| (n.as_str(), e)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Compiles every definition in order; each valid one becomes a base type
/// for the definitions after it. Invalid definitions are reported and
/// skipped, never registered.
pub fn compile_program(program: Program, registry: Registry, scheme: PairingScheme) -> Compilation {
    let mut registry = registry;
    let mut outcomes = Vec::with_capacity(program.defs.len());
    for (index, def) in program.defs.iter().enumerate() {
        let name = def.type_name.text.clone();
        let outcome = (|| {
            let scope = scope_for(&program, index, registry.names());
            let constrs = crate::syntax::validate(def, &scope).map_err(DefError::Invalid)?;
            let config = CodecConfig::new(scheme, constrs, registry.clone()).expect("validated bases are registered");
            let cardinality = cardinality_of(config.constrs(), config.registry());
            let next = register_compiled(&registry, &name, &config)?;
            Ok((CompiledType { config, cardinality }, next))
        })();
        match outcome {
            Ok((compiled, next)) => {
                registry = next;
                outcomes.push((name, Ok(compiled)));
            }
            Err(e) => outcomes.push((name, Err(e))),
        }
    }
    Compilation { program, outcomes, registry }
}

/// [`parse_program`] followed by [`compile_program`].
pub fn compile_source(text: &str, registry: Registry, scheme: PairingScheme) -> Result<Compilation, CompileError> {
    Ok(compile_program(parse_program(text)?, registry, scheme))
}

/// Human-readable summary of one compiled type, as printed by `check`.
pub struct TypeSummary<'a>(pub &'a CompiledType);

impl fmt::Display for TypeSummary<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = self.0;
        let c = t.constrs();
        writeln!(f, "type {}", c.type_name)?;
        writeln!(f, "  constrs: {c}")?;
        writeln!(f, "  normtype: {}", t.normtype())?;
        let bases = c.bases();
        writeln!(f, "  bases: {}", if bases.is_empty() { "(none)".to_string() } else { bases.join(", ") })?;
        write!(f, "  cardinality: {}", t.cardinality)
    }
}
