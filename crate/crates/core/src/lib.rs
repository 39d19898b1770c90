//! Classroom allocation with accessibility penalties.
//!
//! Disciplines meet a fixed number of times per week in (timeslot, room)
//! cells. The objective trades the number of rooms in use against the floors
//! climbed by classes that include a student with reduced mobility:
//!
//! ```text
//! fo = (1 - alpha) * rooms_used + alpha * sum(floor(room) * pcd(discipline))
//! ```

pub mod assignment;
pub mod cli;
pub mod error;
pub mod instance;
pub mod io;
pub mod model;
pub mod objective;
pub mod random;
pub mod report;
pub mod solution;
pub mod solver;
pub mod sweep;

pub use assignment::{check_feasible, objective_value, Assignment, Triple};
pub use error::{Error, Result};
pub use instance::{validate_instance, Discipline, Instance, InstanceOptions, Room, Timeslot};
pub use model::{build_model, Model};
pub use objective::{Alpha, ObjectiveBreakdown};
