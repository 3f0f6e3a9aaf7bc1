use std::sync::Arc;

use decomate_core::llm::{
    extract_json, parse_decomposition_response, parse_motion_response, run_with_repair, ChatRequest, ErrorCode,
    RepairError, RepairPolicy, ReplayTransport, Role, ScriptedTransport, Transport, TransportError, Turn, UserPart,
};
use decomate_core::motion::parse_motion_dsl_unchecked;
use decomate_core::pipeline::{load_flat, Pipeline, PipelineError};
use decomate_core::svg::parse_svg;
use decomate_testkit::{corpus, gen};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn request() -> ChatRequest {
    ChatRequest {
        system_text: "You split drawings.".into(),
        user_parts: vec![UserPart::text("Object: cat\r\nline two"), UserPart::png(vec![137, 80, 78, 71])],
        temperature: 0.2,
        max_output_tokens: 1000,
        followups: vec![
            Turn {
                role: Role::Assistant,
                text: "{}".into(),
            },
            Turn {
                role: Role::User,
                text: "fix it".into(),
            },
        ],
    }
}

#[test]
fn digest_is_frozen() {
    // sha256 over tag, little-endian u64 length and body per field,
    // computed outside this code base
    assert_eq!(request().digest(), "684b7bca7606c6a5fecb4444437f74f708850eb2bbb547fe60df5f4c86ba32d9");
}

#[test]
fn digest_ignores_sampling_settings() {
    let mut r = request();
    r.temperature = 0.9;
    r.max_output_tokens = 5;
    assert_eq!(r.digest(), request().digest());
    r.followups.pop();
    assert_ne!(r.digest(), request().digest());
}

proptest! {
    #[test]
    fn digest_tracks_content(a in ".{0,40}", b in ".{0,40}") {
        let mut x = request();
        x.user_parts[0] = UserPart::text(a.clone());
        let mut y = request();
        y.user_parts[0] = UserPart::text(b.clone());
        prop_assert_eq!(x.digest() == y.digest(), a.replace("\r\n", "\n") == b.replace("\r\n", "\n"));
    }
}

#[test]
fn parsers_survive_noise() {
    let flat = load_flat(&corpus::svg("bird")).unwrap();
    let empty = decomate_core::grouping::GroupingSpec {
        object_name: "bird".into(),
        groups: Vec::new(),
    };
    let grouping = decomate_core::grouping::validate_and_complete(&flat, &empty).0;
    let mut rng = StdRng::seed_from_u64(1234);
    for _ in 0..10_000 {
        let s = gen::noise(&mut rng, 200);
        if let Err(e) = parse_decomposition_response(&s, &flat) {
            assert!(!e.0.is_empty());
        }
        if let Err(e) = parse_motion_response(&s, &grouping) {
            assert!(!e.0.is_empty());
        }
        let _ = extract_json(&s);
        let _ = parse_svg(&s);
        let _ = parse_motion_dsl_unchecked(&s);
    }
}

#[test]
fn repair_never_exceeds_the_budget() {
    let flat = load_flat(&corpus::svg("dog")).unwrap();
    let good = std::fs::read_to_string(
        corpus::llm_fixture_dir().join("ec55a01ee7c1424008cf610b821094b3f1d9fe9f1f44e4ad5a488eb6eee15f4b.txt"),
    )
    .unwrap();
    let mut rng = StdRng::seed_from_u64(8);
    for _ in 0..200 {
        let max_attempts = rng.gen_range(1..=6u32);
        let bad = rng.gen_range(0..=8usize);
        let mut script: Vec<String> = (0..bad).map(|_| gen::noise(&mut rng, 60)).collect();
        script.push(good.clone());
        let transport = ScriptedTransport::new(script);
        let policy = RepairPolicy {
            max_attempts,
            include_validation_errors_in_reprompt: true,
        };
        let out = run_with_repair(&transport, &policy, request(), |t| parse_decomposition_response(t, &flat));
        assert!(transport.calls() <= max_attempts as usize);
        match out {
            Ok(r) => {
                assert_eq!(r.attempts as usize, transport.calls());
                assert_eq!(r.responses.len(), r.attempts as usize);
            }
            Err(RepairError::RepairExhausted { attempts, .. }) => {
                assert_eq!(attempts, max_attempts);
                assert_eq!(transport.calls(), max_attempts as usize);
            }
            Err(e) => panic!("{e}"),
        }
    }
}

#[test]
fn reprompt_carries_errors() {
    let flat = load_flat(&corpus::svg("dog")).unwrap();
    let transport = ScriptedTransport::new(["no json here", "{\"groups\": 3}", "{\"groups\": 4}"]);
    let err = run_with_repair(&transport, &RepairPolicy::default(), request(), |t| parse_decomposition_response(t, &flat))
        .unwrap_err();
    let RepairError::RepairExhausted { attempts, last_errors, .. } = err else { panic!() };
    assert_eq!(attempts, 3);
    assert!(last_errors.has(ErrorCode::SchemaViolation) || last_errors.has(ErrorCode::InvalidJson));
    let sent = transport.requests();
    assert_eq!(sent[1].followups.len(), sent[0].followups.len() + 2);
    assert_eq!(sent[2].followups.len(), sent[0].followups.len() + 4);
    let added = &sent[1].followups[sent[0].followups.len()..];
    assert_eq!(added[0].role, Role::Assistant);
    assert_eq!(added[0].text, "no json here");
    assert_eq!(added[1].role, Role::User);
    assert!(added[1].text.contains("NoJsonFound"));
}

#[test]
fn replay_fixtures_drive_the_pipeline() {
    let transport: Arc<dyn Transport> = Arc::new(ReplayTransport::new(corpus::llm_fixture_dir()));
    let pipeline = Pipeline::new(transport);
    let flat = load_flat(&corpus::svg("bird")).unwrap();
    let out = pipeline.decompose(&flat, "bird").unwrap();
    assert_eq!(out.grouping.group_names(), ["tail", "wing", "body", "head", "eye", "beak", "feet"]);
    assert_eq!(out.attempts, 1);

    let refined = pipeline
        .refine(&flat, "bird", &out.grouping, "split the left and right feet")
        .unwrap();
    assert!(refined.grouping.group("feet").is_none());
    assert_eq!(refined.grouping.group("foot-left").unwrap().members.len(), 2);
}

#[test]
fn missing_fixture_names_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let pipeline = Pipeline::new(Arc::new(ReplayTransport::new(dir.path())));
    let flat = load_flat(&corpus::svg("bird")).unwrap();
    match pipeline.decompose(&flat, "bird") {
        Err(PipelineError::Llm(RepairError::Transport(TransportError::FixtureMissing(d)))) => {
            assert_eq!(d.len(), 64);
        }
        other => panic!("{other:?}"),
    }
}
