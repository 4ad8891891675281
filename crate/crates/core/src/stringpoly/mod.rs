//! String polynomials: normal-ordered operators in `d_s`, `d_r` with
//! coefficients in half-integer powers of `r`, which reproduce the modified
//! string polynomials when applied to `[h^0](h + s + r/h)^(J-1)`.

mod generate;
mod golden;
pub mod identities;
mod operator;
mod partition;
mod srpoly;

use std::fmt;

pub use generate::{generate_table, string_operator, FitReport, OperatorTable, StringPolyError, TableEntry};
pub use golden::golden_table;
pub use operator::{apply, apply_to, generator, reduce_mod_i, OpKey, OperatorPoly};
pub use partition::{Partition, PartitionParseError};
pub use srpoly::SrPoly;

/// Which string equation a polynomial belongs to: the diagonal entry
/// (`a`) or the sub-diagonal entry (`b`) of `V'(L)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variant {
    A,
    B,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::A => "a",
            Variant::B => "b",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
