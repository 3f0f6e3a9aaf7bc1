//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p decomate-service --test acceptance`.

mod common;

use std::collections::BTreeSet;
use std::io::{BufRead, BufReader};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::{Child, Command, Stdio};
use std::time::Instant;

use axum::http::{Method, StatusCode};
use common::{Api, FEET_FEEDBACK, WING_PROMPT};
use decomate_core::codegen::{emit_bundle, emit_preview_html};
use decomate_core::geom::{arc_to_cubics, parse_path_data, path_bbox, CubicBez, Point, Rect};
use decomate_core::grouping::{apply_grouping, fragment_ids, validate_and_complete, GroupingSpec};
use decomate_core::llm::{
    parse_decomposition_response, parse_motion_response, run_with_repair, ChatRequest, RepairError, RepairPolicy,
    ScriptedTransport, UserPart,
};
use decomate_core::motion::{sample_easing, solve_bezier_x, validate_motion, Easing};
use decomate_core::pipeline::load_flat;
use decomate_core::svg::{flatten_and_assign_ids, parse_svg};
use decomate_testkit::{corpus, css, gen, html, oracle};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn main() {
    std::panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("rendering preservation", rendering_preservation),
        ("path geometry", path_geometry),
        ("easing suite", easing_suite),
        ("codegen determinism and validity", codegen_validity),
        ("end-to-end replay", end_to_end_replay),
        ("robustness", robustness),
        ("service persistence", service_persistence),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}

fn rendering_preservation() -> Outcome {
    let start = Instant::now();
    let drawings = corpus::svg_corpus();
    ensure!(drawings.len() >= 20, "corpus has only {} drawings", drawings.len());
    let mut rng = StdRng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (name, text) in &drawings {
        let original = parse_svg(text).map_err(|e| format!("{name}: {e}"))?;
        let flat = flatten_and_assign_ids(&original);
        worst = worst.max(oracle::compare_rendering(&original, &flat, 1e-9).map_err(|e| format!("{name} flat: {e}"))?);
        for _ in 0..10 {
            let spec = gen::grouping(&flat, name, &mut rng);
            let grouped = apply_grouping(&flat, &spec).map_err(|e| format!("{name}: {e}"))?;
            worst = worst
                .max(oracle::compare_rendering(&original, &grouped, 1e-9).map_err(|e| format!("{name} grouped: {e}"))?);
            checks += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    Ok(format!(
        "{} drawings, {checks} groupings, max transform error {worst:.1e} (tol 1e-9), {:.2}s (limit 5s)",
        drawings.len(),
        elapsed.as_secs_f64()
    ))
}

fn bernstein(c: &CubicBez, t: f64) -> Point {
    let mt = 1.0 - t;
    let (a, b, d, e) = (mt * mt * mt, 3.0 * mt * mt * t, 3.0 * mt * t * t, t * t * t);
    Point::new(
        a * c.p0.x + b * c.p1.x + d * c.p2.x + e * c.p3.x,
        a * c.p0.y + b * c.p1.y + d * c.p2.y + e * c.p3.y,
    )
}

fn path_geometry() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2);
    let mut worst_tight = 0.0f64;
    let mut letters = BTreeSet::new();
    for _ in 0..100 {
        let n = rng.gen_range(4..16);
        let d = gen::path_d(&mut rng, n);
        letters.extend(d.chars().filter(|c| c.is_ascii_alphabetic()));
        let path = parse_path_data(&d).map_err(|e| format!("{d}: {e}"))?;
        let bbox = path_bbox(&path);
        let scale = bbox.width().max(bbox.height()).max(1.0);
        let cubics: Vec<CubicBez> = path.cubics().collect();
        if !cubics.is_empty() {
            let per = 10_000 / cubics.len();
            for c in &cubics {
                for i in 0..=per {
                    let p = bernstein(c, i as f64 / per as f64);
                    ensure!(bbox.contains(p, 1e-9 * scale), "{p:?} outside {bbox:?} for {d}");
                }
            }
        }
        let mut want: Option<Rect> = None;
        for sp in &path.subpaths {
            let mut r = Rect::from_point(sp.start);
            for c in sp.cubics() {
                r = r.union(oracle::cubic_extent(&c));
            }
            want = Some(want.map_or(r, |w| w.union(r)));
        }
        let want = want.unwrap();
        for (got, exp) in [
            (bbox.min_x, want.min_x),
            (bbox.min_y, want.min_y),
            (bbox.max_x, want.max_x),
            (bbox.max_y, want.max_y),
        ] {
            let rel = (got - exp).abs() / scale;
            worst_tight = worst_tight.max(rel);
            ensure!(rel <= 1e-6, "edge {got} vs oracle {exp} for {d}");
        }
    }
    ensure!(letters.len() == 20, "only commands {letters:?} exercised");

    let mut worst_arc = 0.0f64;
    for _ in 0..1000 {
        let a = gen::arc_case(&mut rng);
        let (cx, cy, rx, ry) = oracle::arc_center(a.from, a.rx, a.ry, a.rotation_deg, a.large_arc, a.sweep, a.to);
        let mut prev = a.from;
        for s in arc_to_cubics(a.from, a.rx, a.ry, a.rotation_deg, a.large_arc, a.sweep, a.to) {
            let c = CubicBez {
                p0: prev,
                p1: s.c1,
                p2: s.c2,
                p3: s.end,
            };
            for i in 0..=64 {
                worst_arc = worst_arc
                    .max(oracle::ellipse_radial_error(bernstein(&c, i as f64 / 64.0), cx, cy, rx, ry, a.rotation_deg));
            }
            prev = s.end;
        }
    }
    ensure!(worst_arc < 1e-3, "arc deviation {worst_arc:.3e} of the larger radius");
    Ok(format!(
        "100 paths x 1e4 samples contained, max bbox gap {worst_tight:.1e} (tol 1e-6), max arc deviation {worst_arc:.2e} r (tol 1e-3)"
    ))
}

fn easing_suite() -> Outcome {
    let mut rng = StdRng::seed_from_u64(3);
    let mut kinds = std::collections::HashSet::new();
    for _ in 0..1000 {
        let e = gen::easing(&mut rng);
        kinds.insert(std::mem::discriminant(&e));
        ensure!(sample_easing(&e, 0.0) == 0.0 && sample_easing(&e, 1.0) == 1.0, "{e} endpoints");
    }
    ensure!(kinds.len() == 9, "only {} easing kinds drawn", kinds.len());

    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x1, y1, x2, y2) = (
            rng.gen_range(0.0..=1.0),
            rng.gen_range(-2.0..=3.0),
            rng.gen_range(0.0..=1.0),
            rng.gen_range(-2.0..=3.0),
        );
        let u: f64 = rng.gen_range(0.0..=1.0);
        let t = solve_bezier_x(x1, x2, u);
        let (t_ref, _) = oracle::bezier_easing_bisect(x1, y1, x2, y2, u);
        let residual = (oracle::bezier_x(x1, x2, t) - u).abs();
        worst = worst.max(residual);
        ensure!(residual <= 1e-6, "cubic-bezier({x1}, {y1}, {x2}, {y2}) at {u}: t {t} vs {t_ref}");
    }
    let elastic = sample_easing(
        &Easing::ElasticOut {
            amplitude: 1.0,
            period: 0.3,
        },
        0.5,
    );
    ensure!((elastic - 1.015625).abs() < 1e-9, "elastic-out(1) at 0.5 = {elastic}");
    Ok(format!(
        "endpoints exact for 9 kinds, bezier |x(t)-u| max {worst:.1e} vs bisection (tol 1e-6), elastic-out(0.5) = {elastic}"
    ))
}

fn codegen_validity() -> Outcome {
    let drawings = corpus::svg_corpus();
    let mut rng = StdRng::seed_from_u64(4);
    let (mut fragmented, mut tracks) = (0, 0);
    for i in 0..50 {
        let (name, text) = &drawings[i % drawings.len()];
        let flat = load_flat(text).map_err(|e| e.to_string())?;
        let grouping = gen::grouping(&flat, name, &mut rng);
        let grouped = apply_grouping(&flat, &grouping).map_err(|e| e.to_string())?;
        let motion = gen::motion(&grouping, &mut rng);
        tracks += motion.tracks.len();
        let a = emit_bundle(&grouped, &motion, &grouping).map_err(|e| format!("{name}: {e}"))?;
        let b = emit_bundle(&grouped, &motion, &grouping).map_err(|e| format!("{name}: {e}"))?;
        ensure!(a == b, "{name}: bundles differ between runs");
        let summary = css::check(&a.css).map_err(|e| format!("{name}: css {e}"))?;
        let elements = html::check(&a.html).map_err(|e| format!("{name}: html {e}"))?;
        html::check(&emit_preview_html(&a)).map_err(|e| format!("{name}: preview {e}"))?;
        for g in motion.groups() {
            ensure!(summary.selectors.iter().any(|s| *s == format!(".{g}")), "{name}: no rule for {g}");
            let frags = fragment_ids(&grouped, g);
            if frags.len() > 1 {
                fragmented += 1;
            }
            for f in frags {
                ensure!(
                    elements.iter().any(|e| e.attr("id") == Some(f.as_str()) && e.attr("class") == Some(g)),
                    "{name}: fragment {} of {g} not in html",
                    f.as_str()
                );
            }
        }
    }
    ensure!(fragmented > 0, "no fragmented group was exercised");
    Ok(format!(
        "50 pairs ({tracks} tracks, {fragmented} fragmented groups) byte-identical, css and html well-formed, selectors cover all groups"
    ))
}

fn end_to_end_replay() -> Outcome {
    let rt = tokio::runtime::Runtime::new().unwrap();
    rt.block_on(async {
        let start = Instant::now();
        let api = Api::replay();
        let id = api.create("bird", "bird").await;
        let (s, decomposed) = api.call(Method::POST, &format!("/sessions/{id}/decompose"), None).await;
        ensure!(s == StatusCode::OK, "decompose {s}: {decomposed}");
        let (s, refined) = api.post(&format!("/sessions/{id}/refine"), json!({"feedback": FEET_FEEDBACK})).await;
        ensure!(s == StatusCode::OK, "refine {s}: {refined}");
        let (s, animated) = api.post(&format!("/sessions/{id}/animate"), json!({"global_prompt": WING_PROMPT})).await;
        ensure!(s == StatusCode::OK, "animate {s}: {animated}");
        let (s, preview) = api.get(&format!("/sessions/{id}/preview")).await;
        ensure!(s == StatusCode::OK, "preview {s}");
        let (s, export) = api.get(&format!("/sessions/{id}/bundle")).await;
        ensure!(s == StatusCode::OK, "export {s}: {export}");
        let elapsed = start.elapsed();

        let members = |v: &Value| -> BTreeSet<String> {
            v["grouping"]["groups"]
                .as_array()
                .unwrap()
                .iter()
                .flat_map(|g| g["members"].as_array().unwrap().iter().map(|m| m.as_str().unwrap().to_string()))
                .collect()
        };
        let names = |v: &Value| -> Vec<String> {
            v["grouping"]["groups"].as_array().unwrap().iter().map(|g| g["name"].as_str().unwrap().to_string()).collect()
        };
        ensure!(members(&decomposed) == members(&refined), "members changed across refine");
        ensure!(members(&refined).len() == 11, "expected 11 members");
        let refined_names = names(&refined);
        ensure!(
            refined_names.contains(&"foot-left".to_string())
                && refined_names.contains(&"foot-right".to_string())
                && !refined_names.contains(&"feet".to_string()),
            "refined groups {refined_names:?}"
        );
        ensure!(export["manifest"]["groups"] == json!(["wing", "body"]), "manifest groups {}", export["manifest"]["groups"]);
        ensure!(animated["motion"]["tracks"][0]["easing"] == "elastic-out(1, 0.3)", "wing easing");
        let dir = Path::new(export["directory"].as_str().unwrap());
        for f in ["index.html", "style.css", "anim.js", "manifest.json"] {
            ensure!(dir.join(f).is_file(), "{f} missing from export");
        }
        let style = std::fs::read_to_string(dir.join("style.css")).unwrap();
        ensure!(preview.as_str().unwrap().contains(&style), "preview css differs from export");
        ensure!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
        Ok(format!(
            "create/decompose/refine/animate/preview/export ok in {:.3}s (limit 5s), manifest groups [wing, body], 11 members conserved",
            elapsed.as_secs_f64()
        ))
    })
}

fn robustness() -> Outcome {
    let flat = load_flat(&corpus::svg("bird")).unwrap();
    let empty = GroupingSpec {
        object_name: "bird".into(),
        groups: Vec::new(),
    };
    let grouping = validate_and_complete(&flat, &empty).0;
    let mut rng = StdRng::seed_from_u64(6);
    let mut accepted = 0;
    for _ in 0..10_000 {
        let s = gen::noise(&mut rng, 240);
        match parse_decomposition_response(&s, &flat) {
            Ok(g) => {
                ensure!(validate_and_complete(&flat, &g).1.ok, "accepted an invalid grouping from {s:?}");
                accepted += 1;
            }
            Err(e) => ensure!(!e.0.is_empty(), "empty error list for {s:?}"),
        }
        match parse_motion_response(&s, &grouping) {
            Ok(m) => {
                ensure!(validate_motion(&m, &grouping).ok, "accepted invalid motion from {s:?}");
                accepted += 1;
            }
            Err(e) => ensure!(!e.0.is_empty(), "empty error list for {s:?}"),
        }
    }

    let good = std::fs::read_to_string(
        corpus::llm_fixture_dir().join("ec55a01ee7c1424008cf610b821094b3f1d9fe9f1f44e4ad5a488eb6eee15f4b.txt"),
    )
    .unwrap();
    let dog = load_flat(&corpus::svg("dog")).unwrap();
    let mut max_calls = 0;
    for _ in 0..300 {
        let max_attempts = rng.gen_range(1..=6u32);
        let bad = rng.gen_range(0..=8usize);
        let mut script: Vec<String> = (0..bad).map(|_| gen::noise(&mut rng, 80)).collect();
        script.push(good.clone());
        let transport = ScriptedTransport::new(script);
        let policy = RepairPolicy {
            max_attempts,
            include_validation_errors_in_reprompt: rng.gen(),
        };
        let req = ChatRequest {
            system_text: "s".into(),
            user_parts: vec![UserPart::text("t")],
            temperature: 0.2,
            max_output_tokens: 100,
            followups: Vec::new(),
        };
        let out = run_with_repair(&transport, &policy, req, |t| parse_decomposition_response(t, &dog));
        ensure!(transport.calls() <= max_attempts as usize, "{} calls with budget {max_attempts}", transport.calls());
        ensure!(
            matches!(out, Ok(_) | Err(RepairError::RepairExhausted { .. })),
            "unexpected outcome {out:?}"
        );
        max_calls = max_calls.max(transport.calls());
    }
    Ok(format!(
        "2 x 10k noise strings parsed without panic ({accepted} accepted, all valid), 300 repair runs within budget (max {max_calls} calls)"
    ))
}

struct Server {
    child: Child,
    base: String,
}

impl Server {
    fn start(data_dir: &Path) -> Server {
        let mut child = Command::new(env!("CARGO_BIN_EXE_decomate-server"))
            .args(["--bind", "127.0.0.1:0", "--transport", "replay", "--data-dir"])
            .arg(data_dir)
            .arg("--fixture-dir")
            .arg(corpus::llm_fixture_dir())
            .stdout(Stdio::null())
            .stderr(Stdio::piped())
            .spawn()
            .expect("server starts");
        let mut line = String::new();
        BufReader::new(child.stderr.take().unwrap()).read_line(&mut line).unwrap();
        let addr = line
            .split("listening on ")
            .nth(1)
            .and_then(|r| r.split_whitespace().next())
            .unwrap_or_else(|| panic!("unexpected server output {line:?}"))
            .to_string();
        Server {
            child,
            base: format!("http://{addr}"),
        }
    }

    fn call(&self, method: &str, path: &str, body: Option<Value>) -> (u16, Value) {
        let req = ureq::request(method, &format!("{}{path}", self.base));
        let resp = match body {
            Some(b) => req.send_json(b),
            None => req.call(),
        };
        let resp = match resp {
            Ok(r) => r,
            Err(ureq::Error::Status(_, r)) => r,
            Err(e) => panic!("{method} {path}: {e}"),
        };
        let status = resp.status();
        let text = resp.into_string().unwrap();
        (status, serde_json::from_str(&text).unwrap_or(Value::String(text)))
    }

    fn kill(mut self) {
        self.child.kill().unwrap();
        self.child.wait().unwrap();
    }
}

fn service_persistence() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let server = Server::start(dir.path());

    let create = |object: &str, drawing: &str| {
        let (s, v) = server.call("POST", "/sessions", Some(json!({"svg": corpus::svg(drawing), "object_name": object})));
        assert_eq!(s, 201, "{v}");
        v["id"].as_str().unwrap().to_string()
    };
    let fresh = create("bird", "bird");
    let decomposed = create("dog", "dog");
    let animated = create("bird", "bird");

    let mut rejected = 0;
    for (path, body) in [
        ("refine", json!({"feedback": FEET_FEEDBACK})),
        ("animate", json!({"global_prompt": WING_PROMPT})),
    ] {
        let (s, v) = server.call("POST", &format!("/sessions/{fresh}/{path}"), Some(body));
        ensure!(s == 409 && v["code"] == "NotDecomposed", "{path} before decompose gave {s} {v}");
        rejected += 1;
    }
    let (s, _) = server.call("GET", &format!("/sessions/{fresh}/bundle"), None);
    ensure!(s == 409, "export before animate gave {s}");

    let (s, v) = server.call("POST", &format!("/sessions/{decomposed}/decompose"), Some(json!({})));
    ensure!(s == 200, "decompose {s} {v}");
    for (path, body) in [
        ("decompose", json!({})),
        ("refine", json!({"feedback": FEET_FEEDBACK})),
        ("animate", json!({"global_prompt": WING_PROMPT})),
    ] {
        let (s, v) = server.call("POST", &format!("/sessions/{animated}/{path}"), Some(body));
        ensure!(s == 200, "{path} {s} {v}");
    }

    let ids = [&fresh, &decomposed, &animated];
    let before: Vec<Value> = ids.iter().map(|id| server.call("GET", &format!("/sessions/{id}"), None).1).collect();
    server.kill();

    let server = Server::start(dir.path());
    let after: Vec<Value> = ids.iter().map(|id| server.call("GET", &format!("/sessions/{id}"), None).1).collect();
    let (s, _) = server.call("GET", &format!("/sessions/{animated}/bundle"), None);
    server.kill();
    for (b, a) in before.iter().zip(&after) {
        ensure!(b == a, "session {} differs after restart", b["id"]);
    }
    let states: Vec<&str> = after.iter().map(|v| v["state"].as_str().unwrap_or("?")).collect();
    ensure!(states == ["NEW", "DECOMPOSED", "ANIMATED"], "states {states:?}");
    ensure!(s == 200, "export after restart gave {s}");
    Ok(format!(
        "3 sessions ({}) equal after SIGKILL and restart, {rejected} out-of-order calls rejected with 409",
        states.join(", ")
    ))
}
