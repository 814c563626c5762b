//! Tree fixtures shared by the unit tests: the running examples of the
//! figures (reminder, weather/traffic session, restaurant states).

use crate::tree::{Node, SemanticTree};

/// Compositional parse of "Please remind me to call John".
pub fn reminder_compositional() -> SemanticTree {
    SemanticTree::compositional(Node::intent(
        "CREATE_REMINDER",
        vec![
            Node::token("please"),
            Node::token("remind"),
            Node::slot("PERSON_REMINDED", vec![Node::token("me")]),
            Node::token("to"),
            Node::slot(
                "TODO",
                vec![Node::intent(
                    "CREATE_CALL",
                    vec![
                        Node::slot("METHOD", vec![Node::token("call")]),
                        Node::slot("CONTACT", vec![Node::token("john")]),
                    ],
                )],
            ),
        ],
    ))
}

/// Decoupled parse of "Please remind me to call John".
pub fn reminder_decoupled() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "CREATE_REMINDER",
        vec![
            Node::slot("PERSON_REMINDED", vec![Node::token("me")]),
            Node::slot(
                "TODO",
                vec![Node::intent(
                    "CREATE_CALL",
                    vec![
                        Node::slot("METHOD", vec![Node::token("call")]),
                        Node::slot("CONTACT", vec![Node::token("john")]),
                    ],
                )],
            ),
        ],
    ))
}

/// Turn 0 of the weather/traffic/events session: "Weather in San Francisco".
pub fn weather_in_sf() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "GET_WEATHER",
        vec![Node::slot(
            "LOCATION",
            vec![Node::token("san"), Node::token("francisco")],
        )],
    ))
}

/// Turn 1, "Traffic there": explicit reference with antecedent, separator and
/// trigger token.
pub fn traffic_explicit_ref() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "GET_TRAFFIC",
        vec![Node::slot(
            "LOCATION",
            vec![Node::explicit_ref(vec![
                Node::prior_token("san"),
                Node::prior_token("francisco"),
                Node::separator(),
                Node::token("there"),
            ])],
        )],
    ))
}

/// Turn 2, "Any events going on?": implicit reference (slot carryover).
pub fn events_implicit_ref() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "GET_EVENT",
        vec![Node::slot(
            "LOCATION",
            vec![Node::implicit_ref(vec![
                Node::prior_token("san"),
                Node::prior_token("francisco"),
            ])],
        )],
    ))
}

/// First restaurant-search state: "i want a restaurant in the south part of
/// town that serves moroccan food".
pub fn restaurant_south_moroccan() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "FIND_RESTAURANT",
        vec![
            Node::slot("AREA", vec![Node::token("south")]),
            Node::slot("FOOD", vec![Node::token("moroccan")]),
        ],
    ))
}

/// Follow-up state after "how about modern european": AREA carries over.
pub fn restaurant_south_modern_european() -> SemanticTree {
    SemanticTree::decoupled(Node::intent(
        "FIND_RESTAURANT",
        vec![
            Node::slot("AREA", vec![Node::token("south")]),
            Node::slot("FOOD", vec![Node::token("modern"), Node::token("european")]),
        ],
    ))
}
