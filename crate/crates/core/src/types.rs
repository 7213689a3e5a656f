//! Wire types and their inhabitants.
//!
//! Every string in a diagram is labelled by a [`FiniteType`]. All of them
//! except [`FiniteType::Real`] have a finite, deterministically ordered set of
//! inhabitants which can be indexed without enumeration. `Real` carries
//! payoffs and coutilities; it can be checked for membership but never
//! enumerated, so it may not appear as a player's observation or choice.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde_json::Value as Json;

use crate::error::{Error, Result};

/// Fixed-point scale for exact grid values: one unit is 10^-6.
pub const SCALE: i64 = 1_000_000;

/// An exact decimal with six fractional digits.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Scaled(pub i64);

impl Scaled {
    pub fn from_int(v: i64) -> Self {
        Scaled(v * SCALE)
    }

    pub fn to_f64(self) -> f64 {
        self.0 as f64 / SCALE as f64
    }

    /// The fixed-point value closest to `v`, provided it is within 1e-9.
    pub fn from_f64(v: f64) -> Option<Self> {
        if !v.is_finite() {
            return None;
        }
        let scaled = (v * SCALE as f64).round();
        if scaled.abs() > 9.0e15 {
            return None;
        }
        let s = Scaled(scaled as i64);
        ((s.to_f64() - v).abs() <= 1e-9 * v.abs().max(1.0)).then_some(s)
    }

    /// Parses a decimal literal exactly; more than six fractional digits is
    /// rejected rather than rounded.
    pub fn parse(text: &str) -> Option<Self> {
        let (neg, body) = match text.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, text),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.bytes().all(|b| b.is_ascii_digit())
            || !frac_part.bytes().all(|b| b.is_ascii_digit())
            || frac_part.len() > 6
        {
            return None;
        }
        let whole: i64 = if int_part.is_empty() { 0 } else { int_part.parse().ok()? };
        let mut frac: i64 = if frac_part.is_empty() { 0 } else { frac_part.parse().ok()? };
        for _ in frac_part.len()..6 {
            frac *= 10;
        }
        let magnitude = whole.checked_mul(SCALE)?.checked_add(frac)?;
        Some(Scaled(if neg { -magnitude } else { magnitude }))
    }

    pub fn is_integral(self) -> bool {
        self.0 % SCALE == 0
    }
}

impl fmt::Display for Scaled {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.0 < 0 { "-" } else { "" };
        let abs = self.0.unsigned_abs();
        let whole = abs / SCALE as u64;
        let frac = abs % SCALE as u64;
        if frac == 0 {
            write!(f, "{sign}{whole}")
        } else {
            let digits = format!("{frac:06}");
            write!(f, "{sign}{whole}.{}", digits.trim_end_matches('0'))
        }
    }
}

/// The universe of string labels.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum FiniteType {
    /// The dummy set `I = {•}`.
    Unit,
    /// Named alternatives in declaration order.
    Labels(Arc<[Arc<str>]>),
    /// Integers `lo..=hi`.
    IntRange { lo: i64, hi: i64 },
    /// Exact decimals `lo, lo+step, ..., hi`.
    Grid { lo: Scaled, hi: Scaled, step: Scaled },
    /// An explicit ascending set of exact decimals, for irregular grids.
    NumSet(Arc<[Scaled]>),
    Product(Arc<[FiniteType]>),
    /// All lists of `elem` of length at most `max_len`.
    BoundedList { elem: Arc<FiniteType>, max_len: usize },
    /// Real-valued payoffs. Not enumerable.
    Real,
}

impl FiniteType {
    pub fn labels<I, S>(names: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let names: Vec<Arc<str>> = names.into_iter().map(|s| Arc::from(s.as_ref())).collect();
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::InvalidType(format!("duplicate label `{n}`")));
            }
        }
        Ok(FiniteType::Labels(names.into()))
    }

    pub fn int_range(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidType(format!("empty integer range {lo}..{hi}")));
        }
        Ok(FiniteType::IntRange { lo, hi })
    }

    pub fn grid(lo: Scaled, hi: Scaled, step: Scaled) -> Result<Self> {
        if step.0 <= 0 {
            return Err(Error::InvalidType(format!("grid step {step} must be positive")));
        }
        if lo > hi {
            return Err(Error::InvalidType(format!("empty grid {lo}..{hi}")));
        }
        if lo.0 % step.0 != 0 || hi.0 % step.0 != 0 {
            return Err(Error::InvalidType(format!(
                "grid bounds {lo} and {hi} must be multiples of the step {step}"
            )));
        }
        Ok(FiniteType::Grid { lo, hi, step })
    }

    pub fn num_set(values: impl IntoIterator<Item = Scaled>) -> Result<Self> {
        let mut values: Vec<Scaled> = values.into_iter().collect();
        values.sort();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidType("duplicate value in numeric set".into()));
        }
        Ok(FiniteType::NumSet(values.into()))
    }

    pub fn product(parts: impl IntoIterator<Item = FiniteType>) -> Self {
        FiniteType::Product(parts.into_iter().collect())
    }

    pub fn bounded_list(elem: FiniteType, max_len: usize) -> Self {
        FiniteType::BoundedList { elem: Arc::new(elem), max_len }
    }

    pub fn is_finite(&self) -> bool {
        match self {
            FiniteType::Real => false,
            FiniteType::Product(parts) => parts.iter().all(FiniteType::is_finite),
            FiniteType::BoundedList { elem, max_len } => *max_len == 0 || elem.is_finite(),
            _ => true,
        }
    }

    /// Number of inhabitants; `None` for `Real` or when it exceeds `u64`.
    pub fn cardinality(&self) -> Option<u64> {
        match self {
            FiniteType::Unit => Some(1),
            FiniteType::Labels(names) => Some(names.len() as u64),
            FiniteType::IntRange { lo, hi } => Some(hi.abs_diff(*lo) + 1),
            FiniteType::Grid { lo, hi, step } => Some(((hi.0 - lo.0) / step.0) as u64 + 1),
            FiniteType::NumSet(values) => Some(values.len() as u64),
            FiniteType::Product(parts) => parts
                .iter()
                .try_fold(1u64, |acc, p| acc.checked_mul(p.cardinality()?)),
            FiniteType::BoundedList { elem, max_len } => {
                if *max_len == 0 {
                    return Some(1);
                }
                list_subtree(elem.cardinality()?, *max_len)
            }
            FiniteType::Real => None,
        }
    }

    /// The `idx`-th inhabitant in canonical order.
    pub fn value_at(&self, idx: u64) -> Option<Value> {
        if idx >= self.cardinality()? {
            return None;
        }
        Some(match self {
            FiniteType::Unit => Value::Unit,
            FiniteType::Labels(names) => Value::Label {
                index: idx as u32,
                name: names[idx as usize].clone(),
            },
            FiniteType::IntRange { lo, .. } => Value::Int(lo + idx as i64),
            FiniteType::Grid { lo, step, .. } => Value::Fixed(Scaled(lo.0 + idx as i64 * step.0)),
            FiniteType::NumSet(values) => Value::Fixed(values[idx as usize]),
            FiniteType::Product(parts) => {
                let mut rem = idx;
                let mut out = vec![Value::Unit; parts.len()];
                for (slot, part) in out.iter_mut().zip(parts.iter()).rev() {
                    let card = part.cardinality()?;
                    *slot = part.value_at(rem % card)?;
                    rem /= card;
                }
                Value::Tuple(out)
            }
            FiniteType::BoundedList { elem, max_len } => {
                let n = elem.cardinality().unwrap_or(0);
                let mut rem = idx;
                let mut capacity = *max_len;
                let mut out = Vec::new();
                while rem > 0 {
                    rem -= 1;
                    let below = list_subtree(n, capacity - 1)?;
                    out.push(elem.value_at(rem / below)?);
                    rem %= below;
                    capacity -= 1;
                }
                Value::List(out)
            }
            FiniteType::Real => return None,
        })
    }

    /// Position of `v` in canonical order, or `None` if `v` does not inhabit
    /// this type.
    pub fn index_of(&self, v: &Value) -> Option<u64> {
        match (self, v) {
            (FiniteType::Unit, Value::Unit) => Some(0),
            (FiniteType::Labels(names), Value::Label { name, .. }) => {
                names.iter().position(|n| n == name).map(|i| i as u64)
            }
            (FiniteType::IntRange { lo, hi }, Value::Int(x)) => {
                (lo <= x && x <= hi).then(|| x.abs_diff(*lo))
            }
            (FiniteType::Grid { lo, hi, step }, Value::Fixed(x)) => {
                (lo <= x && x <= hi && (x.0 - lo.0) % step.0 == 0)
                    .then(|| ((x.0 - lo.0) / step.0) as u64)
            }
            (FiniteType::NumSet(values), Value::Fixed(x)) => {
                values.binary_search(x).ok().map(|i| i as u64)
            }
            (FiniteType::Product(parts), Value::Tuple(items)) if parts.len() == items.len() => {
                let mut idx = 0u64;
                for (part, item) in parts.iter().zip(items) {
                    idx = idx
                        .checked_mul(part.cardinality()?)?
                        .checked_add(part.index_of(item)?)?;
                }
                Some(idx)
            }
            (FiniteType::BoundedList { elem, max_len }, Value::List(items)) => {
                if items.len() > *max_len {
                    return None;
                }
                let n = elem.cardinality().unwrap_or(0);
                let mut idx = 0u64;
                for (i, item) in items.iter().enumerate() {
                    let below = list_subtree(n, max_len - 1 - i)?;
                    idx = idx.checked_add(1 + elem.index_of(item)?.checked_mul(below)?)?;
                }
                Some(idx)
            }
            _ => None,
        }
    }

    pub fn contains(&self, v: &Value) -> bool {
        match (self, v) {
            (FiniteType::Real, Value::Real(x)) => x.is_finite(),
            (FiniteType::Product(parts), Value::Tuple(items)) => {
                parts.len() == items.len() && parts.iter().zip(items).all(|(p, i)| p.contains(i))
            }
            (FiniteType::BoundedList { elem, max_len }, Value::List(items)) => {
                items.len() <= *max_len && items.iter().all(|i| elem.contains(i))
            }
            _ => self.index_of(v).is_some(),
        }
    }

    /// Canonical enumeration of the inhabitants.
    pub fn values(&self) -> Result<ValueIter<'_>> {
        let card = self
            .cardinality()
            .ok_or_else(|| Error::NotFinite(self.to_string()))?;
        Ok(ValueIter { ty: self, next: 0, card })
    }

    /// Looks up a label by name.
    pub fn label(&self, name: &str) -> Option<Value> {
        match self {
            FiniteType::Labels(names) => names.iter().position(|n| &**n == name).map(|i| {
                Value::Label { index: i as u32, name: names[i].clone() }
            }),
            _ => None,
        }
    }

    /// Coerces a computed value into this type: numbers are converted to the
    /// numeric representation the type uses, then membership is checked.
    pub fn coerce(&self, v: Value) -> Result<Value> {
        let out = match (self, &v) {
            (FiniteType::Real, _) => v.as_f64().map(Value::Real),
            (FiniteType::IntRange { .. }, _) => v.as_f64().and_then(|x| {
                (x.fract() == 0.0 && x.abs() < 9.0e15).then_some(Value::Int(x as i64))
            }),
            (FiniteType::Grid { .. } | FiniteType::NumSet(_), _) => {
                v.as_f64().and_then(Scaled::from_f64).map(Value::Fixed)
            }
            (FiniteType::Labels(names), Value::Label { name, .. }) => names
                .iter()
                .position(|n| n == name)
                .map(|i| Value::Label { index: i as u32, name: names[i].clone() }),
            (FiniteType::Unit, Value::Unit) => Some(Value::Unit),
            (FiniteType::Product(parts), Value::Tuple(items)) if parts.len() == items.len() => {
                let mut out = Vec::with_capacity(items.len());
                for (p, i) in parts.iter().zip(items) {
                    out.push(p.coerce(i.clone())?);
                }
                Some(Value::Tuple(out))
            }
            (FiniteType::BoundedList { elem, .. }, Value::List(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    out.push(elem.coerce(i.clone())?);
                }
                Some(Value::List(out))
            }
            _ => None,
        };
        match out {
            Some(c) if self.contains(&c) => Ok(c),
            _ => Err(Error::NotInhabitant { value: v.to_string(), ty: self.to_string() }),
        }
    }

    /// Reads a JSON rendering of an inhabitant (see [`Value::to_json`]).
    pub fn parse_json(&self, json: &Json) -> Result<Value> {
        let bad = || Error::NotInhabitant { value: json.to_string(), ty: self.to_string() };
        let v = match (self, json) {
            (FiniteType::Unit, Json::Null) => Value::Unit,
            (FiniteType::Labels(_), Json::String(s)) => self.label(s).ok_or_else(bad)?,
            (FiniteType::IntRange { .. }, Json::Number(n)) => {
                Value::Int(n.as_i64().ok_or_else(bad)?)
            }
            (FiniteType::Grid { .. } | FiniteType::NumSet(_), Json::Number(n)) => {
                Value::Fixed(n.as_f64().and_then(Scaled::from_f64).ok_or_else(bad)?)
            }
            (FiniteType::Real, Json::Number(n)) => Value::Real(n.as_f64().ok_or_else(bad)?),
            (FiniteType::Product(parts), Json::Array(items)) if parts.len() == items.len() => {
                let mut out = Vec::with_capacity(items.len());
                for (p, i) in parts.iter().zip(items) {
                    out.push(p.parse_json(i)?);
                }
                Value::Tuple(out)
            }
            (FiniteType::BoundedList { elem, .. }, Json::Array(items)) => {
                let mut out = Vec::with_capacity(items.len());
                for i in items {
                    out.push(elem.parse_json(i)?);
                }
                Value::List(out)
            }
            _ => return Err(bad()),
        };
        if self.contains(&v) {
            Ok(v)
        } else {
            Err(bad())
        }
    }
}

/// Number of lists over an alphabet of size `n` with length at most `m`.
fn list_subtree(n: u64, m: usize) -> Option<u64> {
    let mut total = 0u64;
    let mut power = 1u64;
    for _ in 0..=m {
        total = total.checked_add(power)?;
        power = power.saturating_mul(n);
    }
    Some(total)
}

impl fmt::Display for FiniteType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FiniteType::Unit => write!(f, "unit"),
            FiniteType::Real => write!(f, "real"),
            FiniteType::Labels(names) => write!(f, "{{{}}}", names.join(", ")),
            FiniteType::IntRange { lo, hi } => write!(f, "int({lo}, {hi})"),
            FiniteType::Grid { lo, hi, step } => write!(f, "grid({lo}, {hi}, {step})"),
            FiniteType::NumSet(values) => {
                let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "{{{}}}", parts.join(", "))
            }
            FiniteType::Product(parts) => {
                let parts: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            FiniteType::BoundedList { elem, max_len } => write!(f, "list({elem}, {max_len})"),
        }
    }
}

/// Iterator over the inhabitants of a finite type.
pub struct ValueIter<'a> {
    ty: &'a FiniteType,
    next: u64,
    card: u64,
}

impl Iterator for ValueIter<'_> {
    type Item = Value;

    fn next(&mut self) -> Option<Value> {
        if self.next >= self.card {
            return None;
        }
        let v = self.ty.value_at(self.next);
        self.next += 1;
        v
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.card - self.next) as usize;
        (left, Some(left))
    }
}

/// An inhabitant of some [`FiniteType`].
///
/// Values are untyped at runtime; `FiniteType::contains` decides membership.
/// The total order agrees with each type's canonical order.
#[derive(Clone, Debug)]
pub enum Value {
    Unit,
    Label { index: u32, name: Arc<str> },
    Int(i64),
    Fixed(Scaled),
    Real(f64),
    Tuple(Vec<Value>),
    List(Vec<Value>),
}

impl Value {
    pub fn real(x: f64) -> Self {
        Value::Real(x)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Int(i) => Some(*i as f64),
            Value::Fixed(s) => Some(s.to_f64()),
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }

    pub fn label_name(&self) -> Option<&str> {
        match self {
            Value::Label { name, .. } => Some(name),
            _ => None,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Value::Unit => 0,
            Value::Label { .. } => 1,
            Value::Int(_) => 2,
            Value::Fixed(_) => 3,
            Value::Real(_) => 4,
            Value::Tuple(_) => 5,
            Value::List(_) => 6,
        }
    }

    /// Equality that treats numbers by value and labels by name, used by the
    /// expression evaluator where operands may come from different types.
    pub fn loose_eq(&self, other: &Value) -> bool {
        match (self, other) {
            (Value::Label { name: a, .. }, Value::Label { name: b, .. }) => a == b,
            (Value::Tuple(a), Value::Tuple(b)) | (Value::List(a), Value::List(b)) => {
                a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.loose_eq(y))
            }
            _ => match (self.as_f64(), other.as_f64()) {
                (Some(x), Some(y)) => x == y,
                _ => self == other,
            },
        }
    }

    pub fn to_json(&self) -> Json {
        match self {
            Value::Unit => Json::Null,
            Value::Label { name, .. } => Json::String(name.to_string()),
            Value::Int(i) => Json::from(*i),
            Value::Fixed(s) if s.is_integral() => Json::from(s.0 / SCALE),
            Value::Fixed(s) => number_json(s.to_f64()),
            Value::Real(x) => number_json(*x),
            Value::Tuple(items) | Value::List(items) => {
                Json::Array(items.iter().map(Value::to_json).collect())
            }
        }
    }
}

fn number_json(x: f64) -> Json {
    if x.fract() == 0.0 && x.abs() < 9.0e15 {
        Json::from(x as i64)
    } else {
        serde_json::Number::from_f64(x).map(Json::Number).unwrap_or(Json::Null)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Unit, Value::Unit) => Ordering::Equal,
            (Value::Label { index: a, name: na }, Value::Label { index: b, name: nb }) => {
                a.cmp(b).then_with(|| na.cmp(nb))
            }
            (Value::Int(a), Value::Int(b)) => a.cmp(b),
            (Value::Fixed(a), Value::Fixed(b)) => a.cmp(b),
            (Value::Real(a), Value::Real(b)) => a.total_cmp(b),
            (Value::Tuple(a), Value::Tuple(b)) | (Value::List(a), Value::List(b)) => a.cmp(b),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.rank().hash(state);
        match self {
            Value::Unit => {}
            Value::Label { index, name } => {
                index.hash(state);
                name.hash(state);
            }
            Value::Int(i) => i.hash(state),
            Value::Fixed(s) => s.hash(state),
            Value::Real(x) => x.to_bits().hash(state),
            Value::Tuple(items) | Value::List(items) => items.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Unit => write!(f, "•"),
            Value::Label { name, .. } => write!(f, "{name}"),
            Value::Int(i) => write!(f, "{i}"),
            Value::Fixed(s) => write!(f, "{s}"),
            Value::Real(x) => write!(f, "{x}"),
            Value::Tuple(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "({})", parts.join(", "))
            }
            Value::List(items) => {
                let parts: Vec<String> = items.iter().map(|v| v.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn place() -> FiniteType {
        FiniteType::labels(["GCT", "ES"]).unwrap()
    }

    #[test]
    fn enumerates_small_types() {
        assert_eq!(FiniteType::Unit.values().unwrap().collect::<Vec<_>>(), vec![Value::Unit]);
        let names: Vec<String> = place().values().unwrap().map(|v| v.to_string()).collect();
        assert_eq!(names, ["GCT", "ES"]);
        let ints: Vec<Value> = FiniteType::int_range(0, 3).unwrap().values().unwrap().collect();
        assert_eq!(ints, (0..=3).map(Value::Int).collect::<Vec<_>>());
    }

    #[test]
    fn label_order_is_declaration_order() {
        let t = FiniteType::labels(["zeta", "alpha"]).unwrap();
        let vals: Vec<Value> = t.values().unwrap().collect();
        assert!(vals[0] < vals[1]);
    }

    #[test]
    fn grid_bounds_must_sit_on_step() {
        let err = FiniteType::grid(Scaled::from_int(1), Scaled::from_int(4), Scaled::from_int(2));
        assert!(err.is_err());
        let g = FiniteType::grid(Scaled::from_int(0), Scaled::from_int(12), Scaled::from_int(3))
            .unwrap();
        assert_eq!(g.cardinality(), Some(5));
        assert_eq!(g.index_of(&Value::Fixed(Scaled::from_int(9))), Some(3));
        assert_eq!(g.index_of(&Value::Fixed(Scaled::from_int(4))), None);
    }

    #[test]
    fn list_cardinality_and_order() {
        let t = FiniteType::bounded_list(FiniteType::int_range(0, 1).unwrap(), 2);
        assert_eq!(t.cardinality(), Some(7));
        let shown: Vec<String> = t.values().unwrap().map(|v| v.to_string()).collect();
        assert_eq!(shown, ["[]", "[0]", "[0, 0]", "[0, 1]", "[1]", "[1, 0]", "[1, 1]"]);
    }

    #[test]
    fn history_type_has_91_inhabitants() {
        let q = FiniteType::int_range(1, 3).unwrap();
        let h = FiniteType::bounded_list(FiniteType::product([q.clone(), q]), 2);
        assert_eq!(h.cardinality(), Some(91));
    }

    #[test]
    fn real_is_not_enumerable() {
        assert!(FiniteType::Real.values().is_err());
        assert!(FiniteType::Real.contains(&Value::Real(1.5)));
        assert!(!FiniteType::Real.contains(&Value::Real(f64::NAN)));
    }

    #[test]
    fn scaled_parse_and_display() {
        assert_eq!(Scaled::parse("0.5"), Some(Scaled(500_000)));
        assert_eq!(Scaled::parse("-2"), Some(Scaled(-2_000_000)));
        assert_eq!(Scaled::parse("1.0000001"), None);
        assert_eq!(Scaled(1_250_000).to_string(), "1.25");
        assert_eq!(Scaled(-3_000_000).to_string(), "-3");
    }

    #[test]
    fn coerce_checks_codomain() {
        let t = FiniteType::int_range(0, 2).unwrap();
        assert_eq!(t.coerce(Value::Real(2.0)).unwrap(), Value::Int(2));
        assert!(t.coerce(Value::Real(4.0)).is_err());
        assert!(t.coerce(Value::Real(1.5)).is_err());
    }

    #[test]
    fn json_round_trip_for_nested_values() {
        let q = FiniteType::int_range(1, 3).unwrap();
        let h = FiniteType::bounded_list(FiniteType::product([q.clone(), q]), 2);
        for v in h.values().unwrap() {
            assert_eq!(h.parse_json(&v.to_json()).unwrap(), v);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn small_type() -> impl Strategy<Value = FiniteType> {
            let leaf = prop_oneof![
                Just(FiniteType::Unit),
                (1usize..4).prop_map(|n| FiniteType::labels((0..n).map(|i| format!("L{i}"))).unwrap()),
                (-3i64..3, 0i64..4).prop_map(|(lo, w)| FiniteType::int_range(lo, lo + w).unwrap()),
                (0i64..3, 1i64..3).prop_map(|(k, w)| {
                    let step = Scaled(500_000);
                    FiniteType::grid(Scaled(k * step.0), Scaled((k + w) * step.0), step).unwrap()
                }),
            ];
            leaf.prop_recursive(2, 8, 3, |inner| {
                prop_oneof![
                    prop::collection::vec(inner.clone(), 0..3).prop_map(FiniteType::product),
                    (inner, 0usize..3).prop_map(|(e, n)| FiniteType::bounded_list(e, n)),
                ]
            })
        }

        proptest! {
            #[test]
            fn enumeration_matches_cardinality(t in small_type()) {
                prop_assume!(t.cardinality().unwrap() <= 2000);
                let vals: Vec<Value> = t.values().unwrap().collect();
                prop_assert_eq!(vals.len() as u64, t.cardinality().unwrap());
                for (i, v) in vals.iter().enumerate() {
                    prop_assert_eq!(t.index_of(v), Some(i as u64));
                    prop_assert!(t.contains(v));
                }
                for w in vals.windows(2) {
                    prop_assert!(w[0] < w[1]);
                }
            }
        }
    }
}
