//! Instance and solution files, generators, validation and SVG output.

mod generate;
mod instance;
mod solution;
mod svg;
mod validate;

pub use generate::{gen_random, gen_structured};
pub use instance::{
    bounding_box, geometric_epsilon, parse_instance, parse_points, reconstruct_radius,
    write_instance, Instance,
};
pub use solution::{read_solution, write_solution, Solution};
pub use svg::emit_svg;
pub use validate::{validate, ValidationReport, Violation};
