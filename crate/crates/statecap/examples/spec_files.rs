//! The channel-spec file format: build a model, serialize it, parse it back.
//!
//! Run with: `cargo run --release --example spec_files`

use statecap::{generalized_erasure, parse_spec, serialize_spec, sz_channel};

fn main() -> statecap::Result<()> {
    let model = sz_channel(0.5)?;
    let side = generalized_erasure(0.3, 2)?;
    let text = serialize_spec(&model, Some(&side));
    println!("serialized spec document:\n\n{text}");

    let (parsed, parsed_side) = parse_spec(&text)?;
    assert_eq!(parsed, model);
    assert_eq!(parsed_side.as_ref(), Some(&side));
    println!("round trip: parsed model and side channel match bit-exactly");

    // Fractions are accepted on input.
    let fraction_doc = "\
x 2
y 2
s 2
channel
1/2 1/2
1 0
0 1
1/2 1/2
state
1/2 1/2
";
    let (from_fractions, _) = parse_spec(fraction_doc)?;
    assert_eq!(from_fractions, model);
    println!("fraction-valued document parses to the same model");
    Ok(())
}
