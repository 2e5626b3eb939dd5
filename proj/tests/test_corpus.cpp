#include "medbt/corpus.hpp"
#include "medbt/validate.hpp"

#include <doctest.h>

using namespace medbt;

TEST_CASE("three examples are available")
{
    CHECK(example_names() == std::vector<std::string>{"blood_draw", "airway", "tumor_ablation"});
    CHECK_THROWS_AS(load_example("appendectomy"), Error);
}

TEST_CASE("every example validates and resolves its landmarks")
{
    for (const auto& name : example_names()) {
        CAPTURE(name);
        CorpusEntry e = load_example(name);
        CHECK(e.name == name);
        CHECK(e.tree.name == name);
        CHECK(validate(e.tree).empty());
        CHECK_FALSE(e.landmarks.empty());
        for (const auto& [landmark, id] : e.landmarks) CHECK(find_node(e.tree, id));
        CHECK_THROWS_AS(e.landmark("no_such_landmark"), Error);
    }
}

TEST_CASE("blood draw: preparation sequence, then a selector over the arms")
{
    CorpusEntry e = load_example("blood_draw");
    const Node& top = e.tree.root.children.at(0);
    CHECK(top.kind == NodeKind::Sequence);
    REQUIRE(top.children.size() == 2);
    const Node& prepare = top.children[0];
    CHECK(prepare.kind == NodeKind::Sequence);
    CHECK(prepare.id == e.landmark("prepare"));
    REQUIRE(prepare.children.size() == 3);
    CHECK(prepare.children[2].kind == NodeKind::Condition);
    CHECK(prepare.children[2].id == e.landmark("patient_ready"));

    const Node& veins = top.children[1];
    CHECK(veins.kind == NodeKind::Selector);
    REQUIRE(veins.children.size() == 2);
    CHECK(veins.children[0].id == e.landmark("left_arm_vein"));
    CHECK(veins.children[1].id == e.landmark("right_arm_vein"));
    for (const auto& c : veins.children) CHECK(c.kind == NodeKind::Condition);
}

TEST_CASE("airway: the monitor is the left-most child of the parallel")
{
    CorpusEntry e = load_example("airway");
    const Node& top = e.tree.root.children.at(0);
    CHECK(top.kind == NodeKind::Parallel);
    CHECK(top.id == e.landmark("parallel"));
    REQUIRE(top.children.size() == 2);
    CHECK(top.children[0].id == e.landmark("monitor"));
    CHECK(top.children[1].id == e.landmark("main_algorithm"));
}

TEST_CASE("tumor ablation: recovery node and four planners ahead of the select")
{
    CorpusEntry e = load_example("tumor_ablation");
    const Node* recovery = find_node(e.tree, e.landmark("recovery"));
    REQUIRE(recovery);
    CHECK(recovery->kind == NodeKind::Recovery);

    const Node* select = find_node(e.tree, e.landmark("select_plan"));
    REQUIRE(select);
    CHECK(select->kind == NodeKind::Select);
    CHECK(select->params.options_key == "plans");

    const Node& treatment = recovery->children.at(0);
    std::size_t planners = 0;
    bool select_seen = false;
    for (const auto& step : treatment.children) {
        if (&step == select) {
            select_seen = true;
            break;
        }
        for_each_node(step, [&](const Node& n) {
            if (n.kind == NodeKind::Condition && n.params.check) ++planners;
        });
    }
    CHECK(select_seen);
    CHECK(planners == 4);
}
