"""Bundled example requirements.

minepump.spec, arbiter*.spec: requirement files in the spec-file syntax.
arbiter3.model.json: a three-cell token-ring bus arbiter with a rotating
token (T), persistence latches (P) and an override/grant chain; written by
hand for this package.  Its measured deadtime (3 lost cycles) and response
times (3/6/6) come from exhaustive model checking and are frozen in the
acceptance tests.
stack.py: first-on-last-off stacked signals, ordered and unordered forms.
"""
