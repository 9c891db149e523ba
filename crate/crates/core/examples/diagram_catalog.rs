//! Enumerate singular diagrams on four bodies and match them to the catalog.

use bclab::diagrams::{check_rules, classify, enumerate_report, Classification, Diagram, OrderMode, Tiers};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for mode in [OrderMode::EqualOrder, OrderMode::NonEqualOrder] {
        let r = enumerate_report(mode, Tiers::Full);
        println!("{mode}: {} of {} raw diagrams survive, {} classes", r.raw_accepted, r.raw_total, r.classes.len());
        for c in &r.classes {
            let names = if c.names.is_empty() { "Unnamed".to_string() } else { c.names.join(", ") };
            println!("  {}  x{:<3} {names}", c.key, c.members);
        }
        println!("  rejected by: {:?}", r.rejected_by);
        if !r.unnamed.is_empty() || !r.missing.is_empty() {
            println!("  unnamed {:?}, missing {:?}", r.unnamed, r.missing);
        }
    }

    // Single diagrams: six edge marks (pairs 12,13,14,23,24,34) then four circle marks.
    for text in ["z-ww-z xxxx", "xx-x-- ----", "z----w xxxx", "xx---- -xx-"] {
        let d = Diagram::parse(OrderMode::EqualOrder, text)?;
        let label = match classify(&d) {
            Classification::Named(entries) => entries.iter().map(|e| e.name.as_str()).collect::<Vec<_>>().join("/"),
            Classification::Unnamed => "Unnamed".into(),
        };
        println!("{text}: {:?} ({label})", check_rules(&d));
    }
    Ok(())
}
