use std::collections::{BTreeMap, BTreeSet};

use super::spec::{Iterations, MotionSpec, Origin, Property, Track, Unit};
use crate::grouping::GroupingSpec;
use crate::report::{IssueCode, ValidationReport};

pub const MIN_DURATION_MS: u64 = 16;
pub const MAX_TRACKS_PER_GROUP: usize = 4;

pub fn validate_motion(spec: &MotionSpec, grouping: &GroupingSpec) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut seen: BTreeSet<(&str, Property)> = BTreeSet::new();
    let mut per_group: BTreeMap<&str, usize> = BTreeMap::new();

    for (i, t) in spec.tracks.iter().enumerate() {
        let label = format!("tracks[{i}] {}.{}", t.group, t.property);
        if grouping.group(&t.group).is_none() {
            report.error(
                IssueCode::UnknownGroup,
                &t.group,
                format!("{label}: grouping has no group named {:?}", t.group),
            );
        }
        if !seen.insert((&t.group, t.property)) {
            report.error(
                IssueCode::DuplicateTrack,
                &t.group,
                format!("{label}: group already has a {} track", t.property),
            );
        }
        *per_group.entry(&t.group).or_default() += 1;
        check_track(&mut report, &label, t);
    }

    for (group, n) in per_group {
        if n > MAX_TRACKS_PER_GROUP {
            report.error(
                IssueCode::TooManyTracks,
                group,
                format!("group {group:?} has {n} tracks, at most {MAX_TRACKS_PER_GROUP} allowed"),
            );
        }
    }
    report
}

fn check_track(report: &mut ValidationReport, label: &str, t: &Track) {
    let expected = t.property.unit();
    for (which, v) in [("from", t.from_value), ("to", t.to_value)] {
        if v.unit != expected && !(v.unit == Unit::None && expected != Unit::None) {
            report.error(
                IssueCode::UnitMismatch,
                &t.group,
                format!(
                    "{label}: {which} value {v} should use {}",
                    if expected == Unit::None { "no unit" } else { expected.suffix() }
                ),
            );
        }
        if !v.value.is_finite() {
            report.error(IssueCode::ValueOutOfRange, &t.group, format!("{label}: {which} value is not finite"));
        } else if t.property == Property::Opacity && !(0.0..=1.0).contains(&v.value) {
            report.error(
                IssueCode::ValueOutOfRange,
                &t.group,
                format!("{label}: opacity {which} value {} outside [0, 1]", v.value),
            );
        }
    }
    if t.duration_ms < MIN_DURATION_MS {
        report.error(
            IssueCode::ValueOutOfRange,
            &t.group,
            format!("{label}: duration_ms {} below minimum {MIN_DURATION_MS}", t.duration_ms),
        );
    }
    if t.iterations == Iterations::Count(0) {
        report.error(IssueCode::ValueOutOfRange, &t.group, format!("{label}: iterations must be >= 1"));
    }
    if let Err(reason) = t.easing.check() {
        report.error(IssueCode::ValueOutOfRange, &t.group, format!("{label}: {reason}"));
    }
    if let Origin::Point { x, y } = t.origin {
        if !(x.is_finite() && y.is_finite()) {
            report.error(IssueCode::ValueOutOfRange, &t.group, format!("{label}: origin must be finite"));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouping::GroupSpec;
    use crate::motion::spec::Value;

    fn grouping() -> GroupingSpec {
        GroupingSpec {
            object_name: "bird".into(),
            groups: ["wing", "body"]
                .iter()
                .map(|n| GroupSpec {
                    name: n.to_string(),
                    members: vec![],
                    suggestions: vec![],
                })
                .collect(),
        }
    }

    fn spec(tracks: Vec<Track>) -> MotionSpec {
        MotionSpec {
            tracks,
            ..Default::default()
        }
    }

    #[test]
    fn known_group_ok() {
        let r = validate_motion(&spec(vec![Track::new("wing", Property::Rotate, -15.0, 15.0, 800)]), &grouping());
        assert!(r.ok, "{r:?}");
    }

    #[test]
    fn unknown_group() {
        let r = validate_motion(&spec(vec![Track::new("tail", Property::Rotate, 0.0, 5.0, 500)]), &grouping());
        assert!(!r.ok);
        assert!(r.has(IssueCode::UnknownGroup));
        assert_eq!(r.issues[0].subject, "tail");
    }

    #[test]
    fn range_and_unit_checks() {
        let r = validate_motion(&spec(vec![Track::new("wing", Property::Opacity, 0.0, 1.5, 500)]), &grouping());
        assert!(r.has(IssueCode::ValueOutOfRange));
        let r = validate_motion(&spec(vec![Track::new("wing", Property::Opacity, 0.0, 1.0, 0)]), &grouping());
        assert!(r.has(IssueCode::ValueOutOfRange));
        let mut t = Track::new("wing", Property::Rotate, 0.0, 1.0, 500);
        t.to_value = Value::px(1.0);
        let r = validate_motion(&spec(vec![t]), &grouping());
        assert!(r.has(IssueCode::UnitMismatch));
    }

    #[test]
    fn duplicates_and_track_cap() {
        let r = validate_motion(
            &spec(vec![
                Track::new("wing", Property::Rotate, 0.0, 1.0, 500),
                Track::new("wing", Property::Rotate, 0.0, 2.0, 500),
            ]),
            &grouping(),
        );
        assert!(r.has(IssueCode::DuplicateTrack));
        let five = [
            Property::TranslateX,
            Property::TranslateY,
            Property::Rotate,
            Property::Scale,
            Property::Opacity,
        ]
        .iter()
        .map(|&p| Track::new("body", p, 0.0, 1.0, 500))
        .collect();
        let r = validate_motion(&spec(five), &grouping());
        assert!(r.has(IssueCode::TooManyTracks));
        assert!(!r.has(IssueCode::DuplicateTrack));
    }
}
