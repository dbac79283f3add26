#pragma once

// Generic construction robot: navigation, loading, climbing and placement.

#include "brickctl/efa.hpp"
#include "brickctl/structure.hpp"

#include <memory>
#include <vector>

namespace brickctl {

std::string column_variable(int robot); ///< x-hat of the robot
std::string row_variable(int robot);    ///< y-hat of the robot

/// Declares the robot's position variables, domains 0..n_x and 0..n_y.
void declare_position(const StructureSpec& spec, VariableTable& table, int robot);

/// Heights of the task cells followed by the robot's position.
std::shared_ptr<VariableTable> plant_variables(const StructureSpec& spec, int robot);

/// Local events of the robot: moves, pick, exit and one enter per io cell.
std::vector<Event> local_alphabet(const StructureSpec& spec, int robot);

/// Navigation and loading: outside (marked) and inside locations.
ExtendedAutomaton build_g3(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot);
/// Capacity one: pick, then unload somewhere, then pick again.
ExtendedAutomaton build_g4(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot);
/// Climbing limits on moves, entry and exit.
ExtendedAutomaton build_g5_g6(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                              int robot);
/// Unload only onto a neighboring cell at the robot's own level.
ExtendedAutomaton build_g7(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                           int robot);

std::vector<ExtendedAutomaton> robot_network(const StructureSpec& spec,
                                             std::shared_ptr<const VariableTable> table, int robot);
ExtendedAutomaton build_robot(const StructureSpec& spec, std::shared_ptr<const VariableTable> table,
                              int robot);

} // namespace brickctl
