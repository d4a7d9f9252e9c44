mod common;

use common::*;
use proptest::prelude::*;
use veerkit::perm::{edge_index, edge_pair, Perm4};
use veerkit::signature::*;
use veerkit::triangulation::{check_taut, TautStructure};
use veerkit::Error;

#[test]
fn fixtures_round_trip() {
    for sig in family().iter().chain(census().iter()) {
        let (tri, taut) = decode_taut_signature(sig).unwrap();
        assert_eq!(&encode_taut_signature(&tri, &taut).unwrap(), sig);
        assert_eq!(iso_sig(&tri), sig.iso_sig);
        assert_eq!(iso_sig(&decode_iso_sig(&sig.iso_sig).unwrap()), sig.iso_sig);
    }
}

#[test]
fn coorientation_is_invisible() {
    let (tri, taut) = v0();
    let a = encode_taut_signature(&tri, &taut).unwrap();
    let b = encode_taut_signature(&tri, &taut.reversed()).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.to_string(), V0);
}

#[test]
fn sizes_match_names() {
    // the first letter of an isoSig encodes the number of tetrahedra
    for sig in family() {
        let (tri, _) = decode_taut_signature(&sig).unwrap();
        assert_eq!(tri.size(), (sig.iso_sig.as_bytes()[0] - b'a') as usize);
    }
}

#[test]
fn malformed_signatures() {
    let bad = |s: &str| matches!(TautSignature::parse(s), Err(Error::MalformedSignature(_)));
    assert!(bad("iLLAwQcccedfghhhlnhcqeesr12001122"));
    assert!(bad("iLLAwQcccedfghhhlnhcqeesr_12031122"));
    assert!(bad("iLLAwQcc!edfghhhlnhcqeesr_12001122"));
    assert!(bad("_120"));
    assert!(bad("cPcbbbiht_"));
    assert!(matches!(
        decode_str("iLLAwQcccedfghhhlnhcqeesr_1200112"),
        Err(Error::AngleCountMismatch { angles: 7, tetrahedra: 8 })
    ));
    // truncated body
    assert!(decode_str("iLLAwQcccedf_12001122").is_err());
    // right length, wrong angles
    assert!(decode_str("iLLAwQcccedfghhhlnhcqeesr_00000000").is_err());
}

#[test]
fn census_file_parsing() {
    let list = parse_census("# header\n\ncPcbbbiht_12  # trailing\ndLQacccjsnk_200\n").unwrap();
    assert_eq!(list.len(), 2);
    assert_eq!(list[1].to_string(), "dLQacccjsnk_200");
    assert!(parse_census("cPcbbbiht_12\nnonsense\n").is_err());
    let parsed: TautSignature = "cPcbbbiht_12".parse().unwrap();
    assert_eq!(parsed, list[0]);
}

fn relabelled(sig: &TautSignature, tets: &[usize], perms: &[Perm4]) -> String {
    let (tri, taut) = decode_taut_signature(sig).unwrap();
    let t2 = tri.relabel(tets, perms);
    let mut angles = vec![0u8; tri.size()];
    for t in 0..tri.size() {
        // pair p contains the edge 0-(p+1)
        let p = taut.angles[t] as usize;
        let vm = perms[t];
        angles[tets[t]] = edge_pair(edge_index(vm.apply(0), vm.apply(p + 1))) as u8;
    }
    let taut2 = TautStructure::from_angles(&t2, &angles).unwrap();
    assert!(check_taut(&t2, &taut2).is_taut());
    assert_eq!(iso_sig(&t2), sig.iso_sig);
    encode_taut_signature(&t2, &taut2).unwrap().to_string()
}

fn relabelling(n: usize) -> impl Strategy<Value = (Vec<usize>, Vec<Perm4>)> {
    (
        Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
        proptest::collection::vec((0usize..24).prop_map(|i| Perm4::from_s4_index(i).unwrap()), n),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn canonical_under_relabelling((tets, perms) in relabelling(8), which in 0usize..2) {
        let sig = if which == 0 { family()[0].clone() } else { census()[17].clone() };
        let (tri, _) = decode_taut_signature(&sig).unwrap();
        let n = tri.size();
        let tets: Vec<usize> = {
            // squeeze the permutation of 0..8 down to 0..n
            let mut v: Vec<usize> = tets.into_iter().filter(|&t| t < n).collect();
            v.truncate(n);
            v
        };
        prop_assert_eq!(relabelled(&sig, &tets, &perms[..n]), sig.to_string());
    }
}
