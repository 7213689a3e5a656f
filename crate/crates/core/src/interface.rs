//! Port signatures of diagrams and their reduction to four product types.

use std::fmt;

use crate::types::{FiniteType, Value};

/// Direction of a single string.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dir {
    /// Flows downwards: observations, choices.
    Down,
    /// Flows upwards: outcomes, coutilities.
    Up,
}

/// A typed string with a direction.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Strand {
    pub ty: FiniteType,
    pub dir: Dir,
}

impl Strand {
    pub fn down(ty: FiniteType) -> Self {
        Strand { ty, dir: Dir::Down }
    }

    pub fn up(ty: FiniteType) -> Self {
        Strand { ty, dir: Dir::Up }
    }
}

impl fmt::Display for Strand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.dir {
            Dir::Down => write!(f, "{}", self.ty),
            Dir::Up => write!(f, "{}*", self.ty),
        }
    }
}

/// The four strand lists at the boundary of a diagram.
///
/// Strings labelled by the unit type are omitted, so `id[unit]` has the
/// empty interface.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Interface {
    /// Entering the top, flowing down.
    pub fwd_in: Vec<FiniteType>,
    /// Leaving the top, flowing up.
    pub bwd_out: Vec<FiniteType>,
    /// Leaving the bottom, flowing down.
    pub fwd_out: Vec<FiniteType>,
    /// Entering the bottom, flowing up.
    pub bwd_in: Vec<FiniteType>,
}

/// `X ⊗ S* → Y ⊗ R*` with each side reduced to a single type.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalInterface {
    pub x: FiniteType,
    pub s: FiniteType,
    pub y: FiniteType,
    pub r: FiniteType,
}

impl Interface {
    pub fn new(
        fwd_in: Vec<FiniteType>,
        bwd_out: Vec<FiniteType>,
        fwd_out: Vec<FiniteType>,
        bwd_in: Vec<FiniteType>,
    ) -> Self {
        Interface {
            fwd_in: strip_units(fwd_in),
            bwd_out: strip_units(bwd_out),
            fwd_out: strip_units(fwd_out),
            bwd_in: strip_units(bwd_in),
        }
    }

    pub fn closed() -> Self {
        Interface::default()
    }

    pub fn reduce(&self) -> NormalInterface {
        NormalInterface {
            x: reduce_strands(&self.fwd_in),
            s: reduce_strands(&self.bwd_out),
            y: reduce_strands(&self.fwd_out),
            r: reduce_strands(&self.bwd_in),
        }
    }

    pub fn is_closed(&self) -> bool {
        self.reduce().is_closed()
    }

    /// The top boundary as a strand list: downward strands, then upward.
    pub fn top(&self) -> Vec<Strand> {
        boundary(&self.fwd_in, &self.bwd_out)
    }

    /// The bottom boundary: downward strands leaving, upward strands entering.
    pub fn bottom(&self) -> Vec<Strand> {
        boundary(&self.fwd_out, &self.bwd_in)
    }
}

fn strip_units(list: Vec<FiniteType>) -> Vec<FiniteType> {
    list.into_iter().filter(|t| *t != FiniteType::Unit).collect()
}

fn boundary(down: &[FiniteType], up: &[FiniteType]) -> Vec<Strand> {
    down.iter()
        .cloned()
        .map(Strand::down)
        .chain(up.iter().cloned().map(Strand::up))
        .collect()
}

/// Product of a strand list: nothing is the unit, one strand is itself.
pub fn reduce_strands(list: &[FiniteType]) -> FiniteType {
    match list {
        [] => FiniteType::Unit,
        [t] => t.clone(),
        _ => FiniteType::product(list.iter().cloned()),
    }
}

/// Packs strand values into a value of [`reduce_strands`] of their types.
pub fn pack(values: &[Value]) -> Value {
    match values {
        [] => Value::Unit,
        [v] => v.clone(),
        _ => Value::Tuple(values.to_vec()),
    }
}

/// Inverse of [`pack`] for a list of `n` strands.
pub fn unpack(v: &Value, n: usize) -> Option<Vec<Value>> {
    match (n, v) {
        (0, Value::Unit) => Some(Vec::new()),
        (0, _) => None,
        (1, v) => Some(vec![v.clone()]),
        (_, Value::Tuple(items)) if items.len() == n => Some(items.clone()),
        _ => None,
    }
}

impl NormalInterface {
    pub fn is_closed(&self) -> bool {
        [&self.x, &self.s, &self.y, &self.r]
            .iter()
            .all(|t| **t == FiniteType::Unit)
    }
}

fn side(f: &mut fmt::Formatter<'_>, strands: &[Strand]) -> fmt::Result {
    if strands.is_empty() {
        return write!(f, "I");
    }
    for (i, s) in strands.iter().enumerate() {
        if i > 0 {
            write!(f, " ⊗ ")?;
        }
        write!(f, "{s}")?;
    }
    Ok(())
}

/// Renders a boundary such as `{GCT, ES} ⊗ real*`, or `I` when empty.
pub fn show_boundary(strands: &[Strand]) -> String {
    struct B<'a>(&'a [Strand]);
    impl fmt::Display for B<'_> {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            side(f, self.0)
        }
    }
    B(strands).to_string()
}

impl fmt::Display for Interface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        side(f, &self.top())?;
        write!(f, " → ")?;
        side(f, &self.bottom())
    }
}

impl fmt::Display for NormalInterface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X = {}, S = {}, Y = {}, R = {}", self.x, self.s, self.y, self.r)
    }
}
