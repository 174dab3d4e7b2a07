mod support;

#[test]
fn fixtures_render_identically_and_match_goldens() {
    let (count, failures) = support::golden::check_goldens(100);
    assert_eq!(count, 20);
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
