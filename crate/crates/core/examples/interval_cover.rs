//! Segment-tree encoding of single fields: canonical prefix covers of a few
//! intervals and the bit pattern of a single value.

use std::error::Error;
use std::io::{self, Write};

use fwbool::{canonical_cover, encode_value, interval_to_terms, FieldConfig, Interval};

pub fn run(out: &mut dyn Write) -> Result<(), Box<dyn Error>> {
    let nibble = FieldConfig::new(vec![4])?;
    for (lo, hi) in [(3, 13), (0, 15), (9, 9), (1, 14)] {
        let iv = Interval::new(lo, hi).ok_or("bad interval")?;
        let cover = canonical_cover(iv, 0, &nibble)?;
        let bits: Vec<String> = cover
            .prefixes
            .iter()
            .map(|p| {
                let s = p.bit_string();
                if s.is_empty() {
                    "*".to_string()
                } else {
                    s
                }
            })
            .collect();
        writeln!(
            out,
            "{iv}: {} prefixes {{{}}}",
            cover.len(),
            bits.join(", ")
        )?;
        let terms: Vec<String> = interval_to_terms(iv, 0, &nibble)?
            .iter()
            .map(|t| {
                let lits: Vec<String> = t.iter().map(|l| l.to_string()).collect();
                format!("({})", lits.join(" & "))
            })
            .collect();
        writeln!(out, "  {}", terms.join(" | "))?;
    }

    let byte = FieldConfig::new(vec![8])?;
    let lits: Vec<String> = encode_value(5, 0, &byte)?
        .iter()
        .map(|l| l.to_string())
        .collect();
    writeln!(out, "5 in 8 bits: {}", lits.join(" & "))?;
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run(&mut io::stdout())
}
