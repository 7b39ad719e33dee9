use serde::Serialize;
use serde_json::Value;

/// One JSON object per invocation.
///
/// Everything under `results` is a pure function of the input file and
/// `parameters`; only `timing_ms` varies between identical invocations.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub results: Value,
    pub timing_ms: u64,
    /// False when a verification or sweep criterion failed.
    #[serde(skip)]
    pub success: bool,
}

impl RunReport {
    pub fn new<P: Serialize, R: Serialize>(
        command: &str,
        parameters: &P,
        results: &R,
        started: std::time::Instant,
    ) -> Self {
        RunReport {
            command: command.to_string(),
            parameters: serde_json::to_value(parameters).expect("parameters serialize"),
            results: serde_json::to_value(results).expect("results serialize"),
            timing_ms: started.elapsed().as_millis() as u64,
            success: true,
        }
    }

    pub fn with_success(mut self, success: bool) -> Self {
        self.success = success;
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
