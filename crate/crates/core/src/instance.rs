//! Problem instances: disciplines, weekly timeslots and rooms.
//!
//! An [`Instance`] is plain data. Parsing rejects structurally broken input
//! (duplicate ids, dangling room references); everything else is reported by
//! [`validate_instance`] as a list of [`InstanceViolation`]s so that callers
//! can show all problems at once.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

pub const DEFAULT_FREQUENCY: u32 = 2;

fn default_frequency() -> u32 {
    DEFAULT_FREQUENCY
}

/// A class offering that must meet `frequency` times per week.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discipline {
    pub id: String,
    #[serde(default = "default_frequency")]
    pub frequency: u32,
    /// Whether the class includes a student with a disability.
    #[serde(with = "flag01", default)]
    pub pcd: bool,
    /// `None` means every room is eligible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eligible_rooms: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub enrollment: Option<u32>,
}

impl Discipline {
    pub fn new(id: impl Into<String>, frequency: u32, pcd: bool) -> Self {
        Discipline {
            id: id.into(),
            frequency,
            pcd,
            eligible_rooms: None,
            enrollment: None,
        }
    }

    pub fn with_eligible<I, S>(mut self, rooms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.eligible_rooms = Some(rooms.into_iter().map(Into::into).collect());
        self
    }

    pub fn with_enrollment(mut self, enrollment: u32) -> Self {
        self.enrollment = Some(enrollment);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Room {
    pub id: String,
    #[serde(default)]
    pub block: String,
    /// Ground floor is 0.
    pub floor: u32,
    pub capacity: u32,
    #[serde(default)]
    pub kind: String,
}

impl Room {
    pub fn new(id: impl Into<String>, floor: u32) -> Self {
        Room {
            id: id.into(),
            block: String::new(),
            floor,
            capacity: 40,
            kind: "conventional".to_string(),
        }
    }

    pub fn with_capacity(mut self, capacity: u32) -> Self {
        self.capacity = capacity;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timeslot {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub day: Option<String>,
    #[serde(default)]
    pub order: i64,
}

impl Timeslot {
    pub fn new(id: impl Into<String>, order: i64) -> Self {
        Timeslot {
            id: id.into(),
            day: None,
            order,
        }
    }

    pub fn on_day(mut self, day: impl Into<String>) -> Self {
        self.day = Some(day.into());
        self
    }
}

/// Switches for constraints beyond the base model. All off by default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceOptions {
    /// Drop (discipline, room) pairs whose enrollment exceeds the room capacity.
    pub enforce_capacity: bool,
    /// All meetings of a discipline share one room.
    pub same_room_per_discipline: bool,
    /// At most one meeting of a discipline per day.
    pub distinct_days: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub disciplines: Vec<Discipline>,
    pub timeslots: Vec<Timeslot>,
    pub rooms: Vec<Room>,
    #[serde(default)]
    pub options: InstanceOptions,
}

impl Instance {
    pub fn total_meetings(&self) -> u64 {
        self.disciplines.iter().map(|d| d.frequency as u64).sum()
    }

    pub fn discipline_index(&self, id: &str) -> Option<usize> {
        self.disciplines.iter().position(|d| d.id == id)
    }

    pub fn room_index(&self, id: &str) -> Option<usize> {
        self.rooms.iter().position(|r| r.id == id)
    }

    pub fn timeslot_index(&self, id: &str) -> Option<usize> {
        self.timeslots.iter().position(|t| t.id == id)
    }

    /// Lookup tables from id to position, built once for bulk resolution.
    pub fn index(&self) -> InstanceIndex {
        fn map<'a>(ids: impl Iterator<Item = &'a str>) -> HashMap<String, usize> {
            let mut m = HashMap::new();
            for (i, id) in ids.enumerate() {
                m.entry(id.to_string()).or_insert(i);
            }
            m
        }
        InstanceIndex {
            disciplines: map(self.disciplines.iter().map(|d| d.id.as_str())),
            timeslots: map(self.timeslots.iter().map(|t| t.id.as_str())),
            rooms: map(self.rooms.iter().map(|r| r.id.as_str())),
        }
    }

    /// Day index for each timeslot, numbered by first appearance. `None` for
    /// slots without a day label.
    pub fn slot_days(&self) -> (Vec<Option<usize>>, usize) {
        let mut days: Vec<&str> = Vec::new();
        let idx = self
            .timeslots
            .iter()
            .map(|t| {
                t.day.as_deref().map(|d| match days.iter().position(|x| *x == d) {
                    Some(i) => i,
                    None => {
                        days.push(d);
                        days.len() - 1
                    }
                })
            })
            .collect();
        (idx, days.len())
    }

    /// Whether room `s` may host discipline `d` once eligibility lists and,
    /// if enabled, the capacity filter are applied.
    pub fn is_eligible(&self, d: usize, s: usize) -> bool {
        let disc = &self.disciplines[d];
        let room = &self.rooms[s];
        if let Some(list) = &disc.eligible_rooms {
            if !list.contains(&room.id) {
                return false;
            }
        }
        if self.options.enforce_capacity {
            if let Some(enrolled) = disc.enrollment {
                if enrolled > room.capacity {
                    return false;
                }
            }
        }
        true
    }

    /// Eligible room indices per discipline, in room input order.
    pub fn eligible_rooms(&self) -> Vec<Vec<usize>> {
        (0..self.disciplines.len())
            .map(|d| (0..self.rooms.len()).filter(|&s| self.is_eligible(d, s)).collect())
            .collect()
    }

    /// Distinct floors, ascending.
    pub fn floors(&self) -> Vec<u32> {
        self.rooms
            .iter()
            .map(|r| r.floor)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct InstanceIndex {
    pub disciplines: HashMap<String, usize>,
    pub timeslots: HashMap<String, usize>,
    pub rooms: HashMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum InstanceIssue {
    DuplicateId,
    DanglingRoomReference,
    EmptyEligibility,
    FrequencyZero,
    FrequencyExceedsSlots,
    FrequencyExceedsDays,
    CountingBound,
    CapacityZero,
    MissingDay,
    DuplicateDayOrder,
    NoEligibleRoom,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InstanceViolation {
    pub issue: InstanceIssue,
    pub ids: Vec<String>,
    pub message: String,
}

impl fmt::Display for InstanceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {}", self.issue, self.message)
    }
}

fn violation(issue: InstanceIssue, ids: Vec<String>, message: String) -> InstanceViolation {
    InstanceViolation {
        issue,
        ids,
        message,
    }
}

fn duplicates<'a>(
    out: &mut Vec<InstanceViolation>,
    what: &str,
    ids: impl Iterator<Item = &'a str>,
) {
    let mut seen = HashSet::new();
    for (row, id) in ids.enumerate() {
        if !seen.insert(id) {
            out.push(violation(
                InstanceIssue::DuplicateId,
                vec![id.to_string()],
                format!("duplicate {what} id '{id}' (row {})", row + 1),
            ));
        }
    }
}

/// Checks every instance invariant plus the counting conditions that any
/// feasible assignment needs. An empty result means the instance is valid.
pub fn validate_instance(inst: &Instance) -> Vec<InstanceViolation> {
    let mut out = Vec::new();
    duplicates(&mut out, "discipline", inst.disciplines.iter().map(|d| d.id.as_str()));
    duplicates(&mut out, "timeslot", inst.timeslots.iter().map(|t| t.id.as_str()));
    duplicates(&mut out, "room", inst.rooms.iter().map(|r| r.id.as_str()));

    let room_ids: HashSet<&str> = inst.rooms.iter().map(|r| r.id.as_str()).collect();
    let n_slots = inst.timeslots.len() as u64;
    let n_rooms = inst.rooms.len() as u64;

    for room in &inst.rooms {
        if room.capacity == 0 {
            out.push(violation(
                InstanceIssue::CapacityZero,
                vec![room.id.clone()],
                format!("room '{}' has capacity 0", room.id),
            ));
        }
    }

    let (days, n_days) = inst.slot_days();
    if inst.options.distinct_days {
        for (t, day) in inst.timeslots.iter().zip(&days) {
            if day.is_none() {
                out.push(violation(
                    InstanceIssue::MissingDay,
                    vec![t.id.clone()],
                    format!("distinct_days requires a day label on timeslot '{}'", t.id),
                ));
            }
        }
    }
    let mut day_order = HashSet::new();
    for t in &inst.timeslots {
        if let Some(day) = &t.day {
            if !day_order.insert((day.as_str(), t.order)) {
                out.push(violation(
                    InstanceIssue::DuplicateDayOrder,
                    vec![t.id.clone()],
                    format!("timeslot '{}' repeats (day {day}, order {})", t.id, t.order),
                ));
            }
        }
    }

    for (d, disc) in inst.disciplines.iter().enumerate() {
        if disc.frequency == 0 {
            out.push(violation(
                InstanceIssue::FrequencyZero,
                vec![disc.id.clone()],
                format!("discipline '{}' has frequency 0", disc.id),
            ));
        }
        if disc.frequency as u64 > n_slots {
            out.push(violation(
                InstanceIssue::FrequencyExceedsSlots,
                vec![disc.id.clone()],
                format!(
                    "frequency exceeds |T|: discipline '{}' needs {} meetings but there are {} timeslots",
                    disc.id, disc.frequency, n_slots
                ),
            ));
        }
        if inst.options.distinct_days && disc.frequency as usize > n_days {
            out.push(violation(
                InstanceIssue::FrequencyExceedsDays,
                vec![disc.id.clone()],
                format!(
                    "discipline '{}' needs {} meetings on distinct days but only {} days exist",
                    disc.id, disc.frequency, n_days
                ),
            ));
        }
        let mut structurally_ok = true;
        if let Some(list) = &disc.eligible_rooms {
            if list.is_empty() {
                structurally_ok = false;
                out.push(violation(
                    InstanceIssue::EmptyEligibility,
                    vec![disc.id.clone()],
                    format!("discipline '{}' has an empty eligible room list", disc.id),
                ));
            }
            for r in list {
                if !room_ids.contains(r.as_str()) {
                    structurally_ok = false;
                    out.push(violation(
                        InstanceIssue::DanglingRoomReference,
                        vec![disc.id.clone(), r.clone()],
                        format!("discipline '{}' references unknown room '{r}'", disc.id),
                    ));
                }
            }
        }
        if structurally_ok
            && disc.frequency > 0
            && !(0..inst.rooms.len()).any(|s| inst.is_eligible(d, s))
        {
            out.push(violation(
                InstanceIssue::NoEligibleRoom,
                vec![disc.id.clone()],
                format!("discipline '{}' has no eligible room", disc.id),
            ));
        }
    }

    let total = inst.total_meetings();
    if total > n_slots * n_rooms {
        out.push(violation(
            InstanceIssue::CountingBound,
            Vec::new(),
            format!(
                "Σ freq = {total} > |T|·|S| = {}",
                n_slots * n_rooms
            ),
        ));
    }
    out
}

/// Serde adapter that writes booleans as `0`/`1` and reads either form.
pub(crate) mod flag01 {
    use serde::{de, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*v))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        struct Flag;
        impl de::Visitor<'_> for Flag {
            type Value = bool;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("0, 1, true or false")
            }
            fn visit_bool<E: de::Error>(self, v: bool) -> Result<bool, E> {
                Ok(v)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<bool, E> {
                match v {
                    0 => Ok(false),
                    1 => Ok(true),
                    _ => Err(E::custom(format!("flag must be 0 or 1, got {v}"))),
                }
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<bool, E> {
                if v < 0 {
                    return Err(E::custom(format!("flag must be 0 or 1, got {v}")));
                }
                self.visit_u64(v as u64)
            }
        }
        d.deserialize_any(Flag)
    }
}
