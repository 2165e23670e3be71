// Write CSV and OBJ files of the catenoid for an external viewer.
//
// ```text
// cargo run --example plot_data -- /tmp/catenoid
// ```

use std::path::{Path, PathBuf};

use minann::catenoid::{catenoid_grid, solve_catenoid_params};
use minann::cli::{emit_plot_data, read_obj};

pub fn run_example() -> minann::Result<()> {
    write_to(&std::env::temp_dir().join("minann_catenoid"))
}

fn write_to(stem: &Path) -> minann::Result<()> {
    let p = solve_catenoid_params(1e-13)?;
    let s = catenoid_grid(&p, 16, 64)?;
    let files = emit_plot_data(&s, stem)?;
    let mesh = read_obj(&files.obj)?;
    println!(
        "{}: {} vertices, {} triangles",
        files.obj.display(),
        mesh.vertices.len(),
        mesh.triangles.len()
    );
    println!("{}", files.csv.display());
    Ok(())
}

fn main() -> minann::Result<()> {
    match std::env::args().nth(1) {
        Some(stem) => write_to(&PathBuf::from(stem)),
        None => run_example(),
    }
}
