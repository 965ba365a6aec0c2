//! Canonical-form round-trip: parsing the canonical rendering of a valid
//! model must reproduce that model exactly, and rendering must be a
//! fixpoint (rendering the reparsed model yields identical text).

#[path = "gen/mod.rs"]
mod gen;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ustpa::dsl::{parse_document, render_canonical};
use ustpa::model::{build_model, SafetyModel};

fn roundtrip(model: &SafetyModel, context: &str) {
    let text = render_canonical(model);
    let doc = parse_document(&text);
    assert!(
        doc.diagnostics.is_empty(),
        "{context}: canonical text should reparse cleanly, got {:?}\n--- text ---\n{text}",
        doc.diagnostics
    );
    let again = build_model(doc.declarations)
        .unwrap_or_else(|e| panic!("{context}: reparsed model failed validation: {e}"));
    assert_eq!(
        model.to_declarations(),
        again.to_declarations(),
        "{context}: reparsed model differs"
    );
    assert_eq!(text, render_canonical(&again), "{context}: rendering is not a fixpoint");
}

#[test]
fn bundled_model_roundtrips() {
    let source = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../fixtures/noa_highway.ustpa"
    ))
    .expect("bundled model is readable");
    let doc = parse_document(&source);
    assert!(doc.diagnostics.is_empty(), "bundled model parses cleanly: {:?}", doc.diagnostics);
    let model = build_model(doc.declarations).expect("bundled model validates");
    roundtrip(&model, "bundled model");
}

#[test]
fn thousand_random_models_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5afe_c0de);
    for case in 0..1000 {
        let decls = gen::random_declarations(&mut rng);
        let model = build_model(decls)
            .unwrap_or_else(|e| panic!("case {case}: generated model failed validation: {e}"));
        roundtrip(&model, &format!("case {case}"));
    }
}

#[test]
fn empty_declaration_list_roundtrips() {
    let model = build_model(Vec::new()).expect("empty model is valid");
    roundtrip(&model, "empty model");
}
