//! Loading a channel from JSON, either by Kraus operators or by name.

use chancap::capacity::entropy_gain;
use chancap::channels::ChannelSpec;
use chancap::states::DensityMatrix;

// Bit flip with probability 0.1; entries are [re, im] pairs in row-major order.
const BIT_FLIP: &str = r#"{
  "din": 2, "dout": 2,
  "kraus": [
    [[0.9486832980505138, 0], [0, 0], [0, 0], [0.9486832980505138, 0]],
    [[0, 0], [0.31622776601683794, 0], [0.31622776601683794, 0], [0, 0]]
  ]
}"#;

fn main() -> chancap::Result<()> {
    let flip = ChannelSpec::from_json(BIT_FLIP)?;
    let erasure = ChannelSpec::from_json(r#"{"name": "erasure", "eps": 0.25}"#)?;
    let zero = DensityMatrix::basis(2, 0);
    for (name, ch) in [("bit flip", &flip), ("erasure", &erasure)] {
        println!(
            "{name:<9} {}->{} with {} Kraus operators, entropy gain on |0> = {:.4}",
            ch.din(),
            ch.dout(),
            ch.num_kraus(),
            entropy_gain(ch, &zero)?
        );
    }
    println!("{}", serde_json::to_string(&ChannelSpec::from_channel(&flip)).unwrap());
    Ok(())
}
