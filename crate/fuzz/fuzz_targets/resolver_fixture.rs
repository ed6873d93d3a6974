//! Resolver fixture files are attacker-sized JSONL: loading arbitrary
//! bytes must cleanly parse or cleanly fail, never panic.

#![no_main]

use libfuzzer_sys::fuzz_target;
use wikiverify::access::FixtureResolver;

fuzz_target!(|data: &[u8]| {
    let _ = FixtureResolver::from_reader(data);
});
