#include <gtest/gtest.h>

#include "minioo/rows.hpp"
#include "minioo/types.hpp"
#include "properties.hpp"

using namespace minioo;

namespace {

Row row(std::initializer_list<std::pair<Label, TypePtr>> entries) {
    std::vector<std::pair<Label, TypePtr>> v(entries);
    return Row::from_entries(std::move(v));
}

TypePtr io(TypePtr t) { return ty::action(std::move(t)); }
TypePtr arrow(TypePtr a, TypePtr b) { return ty::fun(std::move(a), std::move(b)); }

// The record of methods produced by the shapes example's base generator.
Row shape_row() {
    return row({{"getX", io(ty::int_())},
                {"getY", io(ty::int_())},
                {"setX", arrow(ty::int_(), io(ty::unit()))},
                {"setY", arrow(ty::int_(), io(ty::unit()))},
                {"moveTo", arrow(ty::int_(), arrow(ty::int_(), io(ty::unit())))},
                {"rMoveTo", arrow(ty::int_(), arrow(ty::int_(), io(ty::unit())))}});
}

Row rect_row() {
    Row r = shape_row();
    r = row_extend(r, "getWidth", io(ty::int_()));
    r = row_extend(r, "getHeight", io(ty::int_()));
    r = row_extend(r, "setWidth", arrow(ty::int_(), io(ty::unit())));
    r = row_extend(r, "setHeight", arrow(ty::int_(), io(ty::unit())));
    r = row_extend(r, "draw", io(ty::unit()));
    return r;
}

Row circle_row() {
    Row r = shape_row();
    r = row_extend(r, "getRadius", io(ty::int_()));
    r = row_extend(r, "setRadius", arrow(ty::int_(), io(ty::unit())));
    r = row_extend(r, "draw", io(ty::unit()));
    return r;
}

// Printable / colored point rows from the points examples.
Row pp_row(TypePtr a) {
    return row({{"varX", ty::ref(a)},
                {"getX", io(a)},
                {"moveX", arrow(a, io(ty::unit()))},
                {"print", io(ty::unit())}});
}

Row cp_row(TypePtr a) { return row_extend(pp_row(a), "getColor", io(ty::string_())); }

}  // namespace

TEST(RowExtend, EmptyRow) {
    Row r = row_extend(Row{}, "getX", io(ty::int_()));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_TRUE(equal_types(*r.find("getX"), io(ty::int_())));
}

TEST(RowExtend, DuplicateLabelRejected) {
    Row r = row({{"getX", io(ty::int_())}});
    try {
        row_extend(r, "getX", io(ty::int_()));
        FAIL() << "expected DuplicateLabel";
    } catch (const RowError& e) {
        EXPECT_EQ(e.kind, RowError::Kind::DuplicateLabel);
        EXPECT_EQ(e.label, "getX");
    }
}

TEST(RowExtend, RectangleRowHasElevenEntries) {
    EXPECT_EQ(rect_row().size(), 11u);
    EXPECT_EQ(circle_row().size(), 9u);
}

TEST(RowUpdate, SameTypeIsIdempotent) {
    Row r = row({{"print", io(ty::unit())}});
    Row u = row_update(r, "print", io(ty::unit()));
    EXPECT_TRUE(props::rows_equal(r, u));
}

TEST(RowUpdate, MissingLabel) {
    Row r = row({{"getX", io(ty::int_())}});
    try {
        row_update(r, "print", io(ty::unit()));
        FAIL() << "expected MissingLabel";
    } catch (const RowError& e) {
        EXPECT_EQ(e.kind, RowError::Kind::MissingLabel);
        EXPECT_EQ(e.label, "print");
    }
}

// The overriding colored point updates print in place: its row equals the
// plain colored point's row.
TEST(RowUpdate, OverrideKeepsTheColoredPointRow) {
    Row base = cp_row(ty::int_());
    Row overridden = row_update(base, "print", io(ty::unit()));
    EXPECT_TRUE(props::rows_equal(base, overridden));
}

TEST(RowUnionLeft, EmptyIsLeftIdentity) {
    Row r = cp_row(ty::int_());
    EXPECT_TRUE(props::rows_equal(row_union_left(Row{}, r), r));
}

TEST(RowUnionLeft, LeftBiasWinsOnCollision) {
    Row a = row({{"print", io(ty::unit())}});
    Row b = row({{"print", io(ty::int_())}, {"moveX", arrow(ty::int_(), io(ty::unit()))}});
    Row u = row_union_left(a, b);
    ASSERT_EQ(u.size(), 2u);
    EXPECT_TRUE(equal_types(*u.find("print"), io(ty::unit())));
}

// heavy_point: {print, moveX} unioned over three point rows keeps exactly
// one print and one moveX.
TEST(RowUnionLeft, HeavyPointKeepsOneOfEach) {
    Row own = row({{"print", io(ty::unit())}, {"moveX", arrow(ty::int_(), io(ty::unit()))}});
    Row point = row({{"varX", ty::ref(ty::int_())},
                     {"getX", io(ty::int_())},
                     {"moveX", arrow(ty::int_(), io(ty::unit()))},
                     {"print", io(ty::unit())}});
    Row u = row_union_left(row_union_left(row_union_left(own, point), point), point);
    EXPECT_EQ(u.size(), 4u);
    EXPECT_TRUE(u.has("varX"));
    EXPECT_TRUE(u.has("getX"));
}

TEST(RowIntersect, Simple) {
    Row a = row({{"a", ty::int_()}, {"b", ty::bool_()}});
    Row b = row({{"b", ty::bool_()}, {"c", ty::string_()}});
    EXPECT_EQ(row_intersect(a, b), (std::set<Label>{"b"}));
}

TEST(RowIntersect, RectangleAndCircleShareTheShapeInterface) {
    std::set<Label> shared = row_intersect(rect_row(), circle_row());
    EXPECT_EQ(shared, (std::set<Label>{"getX", "getY", "setX", "setY", "moveTo", "rMoveTo",
                                       "draw"}));
}

TEST(RowIntersect, Idempotent) {
    Row r = rect_row();
    EXPECT_EQ(row_intersect(r, r), r.labels());
}

TEST(RowProject, Simple) {
    Row a = row({{"a", ty::int_()}, {"b", ty::bool_()}});
    Row p = row_project(a, {"b"});
    ASSERT_EQ(p.size(), 1u);
    EXPECT_TRUE(equal_types(*p.find("b"), ty::bool_()));
}

TEST(RowProject, RectangleToShapeInterface) {
    Row p = row_project(rect_row(), row_intersect(rect_row(), circle_row()));
    EXPECT_EQ(p.size(), 7u);
    EXPECT_TRUE(p.has("draw"));
    EXPECT_FALSE(p.has("getWidth"));
}

TEST(RowProject, EmptyProjection) {
    EXPECT_EQ(row_project(rect_row(), {}).size(), 0u);
}

TEST(RowProject, MissingLabel) {
    EXPECT_THROW(row_project(shape_row(), {"draw"}), RowError);
}

TEST(WidthSubtype, Reflexive) {
    EXPECT_TRUE(width_subtype(rect_row(), rect_row()));
}

TEST(WidthSubtype, ColoredPointBelowPrintablePoint) {
    EXPECT_TRUE(width_subtype(cp_row(ty::int_()), pp_row(ty::int_())));
    EXPECT_FALSE(width_subtype(pp_row(ty::int_()), cp_row(ty::int_())));
}

namespace {

// Vectors over printable and colored points (the depth-subtyping demo).
TypePtr vector_of(const Row& point) {
    return ty::record(row({{"getP1", io(ty::record(point))},
                           {"getP2", io(ty::record(point))},
                           {"print", io(ty::unit())}}));
}

// vector2 adds a setter whose argument type is the point type (co-variant).
TypePtr vector2_of(const Row& point) {
    return ty::record(row({{"setO", arrow(ty::record(point), io(ty::unit()))},
                           {"getP1", io(ty::record(point))},
                           {"getP2", io(ty::record(point))},
                           {"print", io(ty::unit())}}));
}

}  // namespace

TEST(DepthSubtype, ColoredVectorBelowPlainVector) {
    EXPECT_TRUE(depth_subtype(vector_of(cp_row(ty::int_())), vector_of(pp_row(ty::int_()))));
}

TEST(DepthSubtype, CovariantArgumentBreaksSubtyping) {
    EXPECT_FALSE(
        depth_subtype(vector2_of(cp_row(ty::int_())), vector2_of(pp_row(ty::int_()))));
}

TEST(DepthSubtype, Reflexive) {
    TypePtr t = vector_of(cp_row(ty::int_()));
    EXPECT_TRUE(depth_subtype(t, t));
}

TEST(DepthSubtype, RefsAreInvariant) {
    TypePtr s = ty::ref(ty::record(cp_row(ty::int_())));
    TypePtr t = ty::ref(ty::record(pp_row(ty::int_())));
    EXPECT_FALSE(depth_subtype(s, t));
}

TEST(LubRow, RectangleCircleGivesTheShapeRow) {
    Row lub = lub_row(rect_row(), circle_row());
    EXPECT_EQ(lub.size(), 7u);
    EXPECT_TRUE(lub.has("draw"));
}

TEST(LubRow, Idempotent) {
    EXPECT_TRUE(props::rows_equal(lub_row(rect_row(), rect_row()), rect_row()));
}

TEST(LubRow, SharedLabelClash) {
    Row a = row({{"a", ty::int_()}});
    Row b = row({{"a", ty::bool_()}});
    try {
        lub_row(a, b);
        FAIL() << "expected FieldTypeClash";
    } catch (const RowError& e) {
        EXPECT_EQ(e.kind, RowError::Kind::FieldTypeClash);
        EXPECT_EQ(e.label, "a");
    }
}

TEST(DeepNarrow, IdentityOnEqualTypes) {
    TypePtr t = vector_of(pp_row(ty::int_()));
    PlanPtr p = derive_deep_narrow(t, t);
    EXPECT_EQ(p->kind, CoercionPlan::Kind::Identity);
}

// Narrowing a colored vector to a plain vector wraps the getters' actions
// with projections and leaves print alone.
TEST(DeepNarrow, ColoredVectorPlanShape) {
    PlanPtr p = derive_deep_narrow(vector_of(cp_row(ty::int_())), vector_of(pp_row(ty::int_())));
    ASSERT_EQ(p->kind, CoercionPlan::Kind::PerField);
    ASSERT_TRUE(p->field_plans.count("getP1"));
    const PlanPtr& g = p->field_plans.at("getP1");
    ASSERT_EQ(g->kind, CoercionPlan::Kind::WrapAction);
    ASSERT_EQ(g->result->kind, CoercionPlan::Kind::Project);
    EXPECT_EQ(g->result->labels, pp_row(ty::int_()).labels());
    EXPECT_EQ(p->field_plans.at("print")->kind, CoercionPlan::Kind::Identity);
}

TEST(DeepNarrow, CovariantArgumentNamesTheOffendingPath) {
    try {
        derive_deep_narrow(vector2_of(cp_row(ty::int_())), vector2_of(pp_row(ty::int_())));
        FAIL() << "expected NotDeepSubtype";
    } catch (const RowError& e) {
        EXPECT_EQ(e.kind, RowError::Kind::NotDeepSubtype);
        EXPECT_NE(e.path.find("setO.arg"), std::string::npos) << e.path;
    }
}

TEST(Nominal, ReflexiveAndDeclaredAncestry) {
    NominalGraph g;
    g.declare("PP", {});
    g.declare("CP", {"PP"});
    EXPECT_TRUE(g.is_ancestor("PP", "PP"));
    EXPECT_TRUE(g.is_ancestor("CP", "PP"));
    EXPECT_FALSE(g.is_ancestor("PP", "CP"));
}

TEST(Nominal, UnknownNomination) {
    NominalGraph g;
    g.declare("PP", {});
    EXPECT_THROW(g.is_ancestor("PP", "ZZ"), RowError);
    EXPECT_THROW(g.declare("CP", {"ZZ"}), RowError);
}

// ---------------------------------------------------------------------------
// Property suites (shared with the acceptance binary)
// ---------------------------------------------------------------------------

TEST(Properties, WidthPartialOrder) {
    auto r = props::width_partial_order();
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Properties, WidthImpliesDepth) {
    auto r = props::width_implies_depth();
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Properties, LubAgainstBruteForceOracle) {
    auto r = props::lub_oracle();
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Properties, DeepNarrowAgreesWithDepthSubtype) {
    auto r = props::deep_narrow_agreement(1000);
    EXPECT_TRUE(r.ok) << r.detail;
}

TEST(Properties, AncestorAgainstClosureOracle) {
    auto r = props::ancestor_oracle(200);
    EXPECT_TRUE(r.ok) << r.detail;
}
