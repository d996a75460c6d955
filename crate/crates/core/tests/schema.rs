use relinfo::info::JointDistribution;
use serde_json::Value;

fn schema() -> Value {
    let path = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schemas/joint_distribution.schema.json"
    );
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn keys(v: &Value) -> Vec<String> {
    let mut k: Vec<String> = v.as_object().unwrap().keys().cloned().collect();
    k.sort();
    k
}

#[test]
fn serialized_fields_match_schema() {
    let schema = schema();
    let joint = JointDistribution::from_weights([("S", 2), ("X", 3)], vec![1.0; 6]).unwrap();
    let doc = serde_json::to_value(&joint).unwrap();

    assert_eq!(keys(&doc), keys(&schema["properties"]));
    let variable = &doc["variables"][0];
    assert_eq!(
        keys(variable),
        keys(&schema["properties"]["variables"]["items"]["properties"])
    );
    let mut required: Vec<&str> = schema["required"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    required.sort();
    assert_eq!(required, ["mass", "variables"]);
}

#[test]
fn documents_outside_schema_are_rejected() {
    for bad in [
        r#"{"variables":[{"name":"S","size":2}],"mass":[0.5,0.5],"extra":1}"#,
        r#"{"variables":[{"name":"S","size":0}],"mass":[]}"#,
        r#"{"variables":[],"mass":[1.0]}"#,
        r#"{"variables":[{"name":"S","size":2}],"mass":[1.5,-0.5]}"#,
        r#"{"variables":[{"name":"S","size":2}],"mass":[0.5]}"#,
        r#"{"mass":[1.0]}"#,
    ] {
        assert!(
            serde_json::from_str::<JointDistribution>(bad).is_err(),
            "{bad}"
        );
    }
}
