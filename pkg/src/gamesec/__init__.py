"""Security-typed game semantics: leveled games, strategies, flow analysis and a DCC front end."""
