//! Line-delimited JSON transcripts.

use std::io::{self, Write};

use serde::{Serialize, Serializer};

use crate::quantum::PureState;

/// Serializes a bit as the integer 0 or 1.
pub fn bit<S: Serializer>(b: &bool, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_u8(*b as u8)
}

/// Serializes a state as its list of `(re, im)` amplitude pairs.
pub fn state<S: Serializer>(st: &PureState, s: S) -> Result<S::Ok, S::Error> {
    st.to_pairs().serialize(s)
}

pub fn bits_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Writes one JSON object per line.
pub fn write_jsonl<W: Write, T: Serialize>(mut out: W, lines: &[T]) -> io::Result<()> {
    for line in lines {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}
