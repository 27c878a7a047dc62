use std::process::exit;

fn main() {
    exit(sensor_collab::cli::run());
}
