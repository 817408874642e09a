//! Run a TOML scenario the same way the `optocycle run` command does.

use optocycle::cli::{run_config_text, Overrides};

const SCENARIO: &str = r#"
name = "example"
model = "cavity_discrete"
seed = 7
outputs = ["trace_csv", "cycle_json", "level_diagram_csv"]

[system]
omega = 12.0
levels = [{ m = 0, p = 0.5 }, { m = 1, p = 0.3 }, { m = 2, p = 0.2 }]

[design]
amplitude = 30.0
omega0 = 40.0
n_harmonics = 50
coupling = { kind = "gaussian_sampled", mean = 10.0, std_dev = 0.1 }

[time_grid]
periods = 3.0
n_samples = 4096
"#;

fn main() {
    let dir = std::env::temp_dir().join("optocycle-example");
    std::fs::create_dir_all(&dir).expect("temp dir");
    match run_config_text(SCENARIO, &Overrides::default(), &dir) {
        Ok(summary) => print!("{summary}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
