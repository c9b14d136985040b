//! Channel descriptions as JSON records, the format the command line reads.

use channelscope::channels::ChannelSpec;

fn main() {
    let records = [
        r#"{"family":"pauli","lambda":[0.7,0.1,0.1,0.1]}"#,
        r#"{"family":"depolarizing","d":3,"lambda":0.5}"#,
        r#"{"family":"trace_class","fixed_state":[[1,0],[0,0]]}"#,
        r#"{"family":"custom_kraus","d":2,"kraus":[[[[1,0],[0,0]],[[0,0],[0.8,0]]],[[[0,0],[0.6,0]],[[0,0],[0,0]]]]}"#,
        r#"{"family":"pauli","lambda":[0.5,0.5,0.5,-0.5]}"#,
        r#"{"family":"cloning","d":3,"colour":"red"}"#,
    ];
    for text in records {
        match ChannelSpec::parse_json(text) {
            Ok(spec) => println!(
                "ok   {:<14} {} -> {}  {}",
                spec.family().name(),
                spec.input_dim(),
                spec.output_dim(),
                serde_json::to_string(&spec.to_record()).unwrap()
            ),
            Err(e) => println!("err  {e}"),
        }
    }
}
