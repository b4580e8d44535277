use std::time::Instant;

use serde_json::{Map, Value};

/// Text lines and a parallel JSON object. Timings are kept apart so that two
/// runs differ only on the `time ...` lines (or under the `timings` key).
pub struct Report {
    lines: Vec<String>,
    json: Map<String, Value>,
    timings: Vec<(String, u128)>,
}

impl Report {
    pub fn new(command: &[String]) -> Self {
        let mut json = Map::new();
        json.insert("command".into(), Value::from(command.to_vec()));
        Report {
            lines: vec![format!("command: {}", command.join(" "))],
            json,
            timings: Vec::new(),
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn set(&mut self, key: &str, value: impl serde::Serialize) {
        let v = serde_json::to_value(value).expect("report values serialize");
        self.json.insert(key.into(), v);
    }

    pub fn timed<T>(&mut self, what: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.timings
            .push((what.into(), start.elapsed().as_millis()));
        out
    }

    pub fn render(mut self, json: bool) -> String {
        if json {
            let timings: Map<String, Value> = self
                .timings
                .into_iter()
                .map(|(k, ms)| (k, Value::from(ms as u64)))
                .collect();
            self.json
                .insert("timings_ms".into(), Value::Object(timings));
            let mut s = serde_json::to_string_pretty(&Value::Object(self.json)).unwrap();
            s.push('\n');
            s
        } else {
            for (k, ms) in &self.timings {
                self.lines.push(format!("time {k}: {ms} ms"));
            }
            let mut s = self.lines.join("\n");
            s.push('\n');
            s
        }
    }
}
