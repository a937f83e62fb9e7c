mod common;

use common::transcripts;
use ipkit::field::RandomSource;
use ipkit::replay::{replay, ReplayVerdict};
use ipkit::transcript::Transcript;

#[test]
fn recorded_transcripts_replay_to_their_verdicts() {
    let all = transcripts();
    assert_eq!(all.len(), 100);
    for text in &all {
        let recorded = Transcript::from_jsonl(text)
            .unwrap()
            .summary
            .unwrap()
            .verdict;
        match replay(text).unwrap() {
            ReplayVerdict::Verified { verdict } => assert_eq!(verdict, recorded),
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn single_byte_mutations_are_detected() {
    let mut rng = RandomSource::new(2024);
    for text in transcripts() {
        let mut bytes = text.into_bytes();
        let pos = rng.below(bytes.len() as u64) as usize;
        let old = bytes[pos];
        let new = loop {
            let b = b' ' + rng.below(95) as u8;
            if b != old {
                break b;
            }
        };
        bytes[pos] = new;
        let mutated = String::from_utf8(bytes).unwrap();
        let detected = !matches!(replay(&mutated), Ok(ReplayVerdict::Verified { .. }));
        assert!(detected, "mutation at byte {pos} went unnoticed");
    }
}
