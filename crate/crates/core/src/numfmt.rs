//! Full-precision decimal serialization for floating point values written to
//! index files. Every value is emitted with 17 significant digits so that a
//! reload reproduces the exact same `f64`.

use serde::ser::Error as _;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

pub(crate) fn format(x: f64) -> String {
    format!("{x:.16e}")
}

fn raw(x: f64) -> Result<Box<RawValue>, serde_json::Error> {
    if !x.is_finite() {
        return Err(serde_json::Error::custom(format!("non-finite value {x}")));
    }
    RawValue::from_string(format(x))
}

pub(crate) fn f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    let r = raw(*x).map_err(S::Error::custom)?;
    r.serialize(s)
}
