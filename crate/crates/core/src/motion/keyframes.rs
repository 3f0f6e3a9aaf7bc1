use super::easing::sample_easing;
use super::spec::{Keyframe, Track, Value};

/// Default sample count for easings CSS cannot express.
pub const DEFAULT_SAMPLES: usize = 33;

/// Samples the track at offsets `i / (n - 1)`. `n` below 2 is raised to 2.
pub fn expand_track_keyframes(t: &Track, n: usize) -> Vec<Keyframe> {
    let n = n.max(2);
    let from = t.from_value.value;
    let to = t.to_value.value;
    let unit = t.property.unit();
    (0..n)
        .map(|i| {
            let offset = i as f64 / (n - 1) as f64;
            let p = sample_easing(&t.easing, offset);
            let value = if p == 1.0 { to } else { from + (to - from) * p };
            Keyframe {
                offset,
                value: Value::new(value, unit),
            }
        })
        .collect()
}
