"""Prompt templates for episode categorization and policy reports.

The templates are frozen text with named substitution slots; the golden
tests pin every byte outside the slots. Changing a template is a breaking
change for downstream consumers that parse model output.
"""

from __future__ import annotations

from .categories import TASK_CATEGORIES

CATEGORY_LIST = ", ".join(TASK_CATEGORIES)

FULL_REPORT_SECTIONS = (
    "1. Policy Overview",
    "2. Comparative Performance",
    "3. Strengths",
    "4. Weaknesses",
    "5. Instruction Following",
    "6. Reasoning",
    "7. Manipulation Skills",
    "8. Robustness to Scene Variations",
    "9. Common Failure Modes",
)

SUMMARY_HEADINGS = (
    "- Policy Overview:",
    "- Comparative Performance:",
    "- Strengths:",
    "- Weaknesses:",
    "- Instruction Following:",
    "- Reasoning:",
    "- Manipulation Skills:",
    "- Robustness to Scene Variations:",
    "- Common Failure Modes:",
)

EPISODE_SEPARATOR = "========== Episode Report #{number} =========="

CATEGORIZE_PROMPT_TEMPLATE = """You are shown the first frames of a robot manipulation episode and the task \
instruction that was given to the robot.

Task instruction: {instruction}

1. Categorize the task. Reply with exactly one of the following categories, verbatim: {categories}.
2. Describe the scene: lighting, clutter, object visibility, and anything notable about the camera viewpoint.

Reply with the task category on the first line, followed by the scene description.
"""

FULL_REPORT_PROMPT_TEMPLATE = """We are evaluating a policy named {policy_name} deployed on a robot arm to perform \
various manipulation tasks.
This policy was compared head-to-head against other policies across multiple episodes. Each episode includes:
- A session ID
- A task description and the task category it belongs to. The possible task categories are: {categories}.
- A scene and task analysis
- Head-to-head evaluation results

Using the episode data provided, generate a structured and comprehensive summary report in the format below:

1. Policy Overview
A brief paragraph summarizing the general behavior, capabilities, and limitations of the policy.

2. Comparative Performance
How the policy performed in head-to-head comparisons against other policies across the different task \
categories. For each task category, create a bullet point with a discussion of how the policy consistently \
outperformed or underperformed compared to all the other policies. Make sure in this section that every claim \
about the policy is with respect to other competing policies. When making a claim, always mention how the other \
policies performed in comparison to the current policy. Do not discuss the policy in isolation. Don't mention a \
task category unless there is evidence of the policy performing well or poorly in that category across multiple \
episodes. Make your claims based on overall performance or underperformance for specific task categories rather \
than individual episodes. There is no need to reference specific session IDs in this section (no <ref> tags).

3. Strengths
Bullet-pointed list of notable strengths in manipulation behavior or general reliability. Mention the task \
categories the policy is good at (if any) instead of basing a claim on a single instance. Focus on generalizable \
behaviors like smooth trajectories, robust grasping, or adaptability. Use concrete examples and session ID citations.

4. Weaknesses
Bullet-pointed list of recurring limitations or error patterns. Mention the task categories the policy is poor \
at instead of basing a claim on a single instance. Mention issues such as fine motor control, object confusion, \
multi-step failure, etc. Include session ID references with <ref> tags.

5. Instruction Following
Analyze how well the policy understands and executes task instructions. Note sensitivity to language structure, \
ability to follow negated or relational commands, issues with ambiguous phrasing, ability to handle typos, etc. \
Cite session-specific evidence.

6. Reasoning
Evaluate the policy's ability to reason about both the scene context (e.g., spatial relationships, object \
visibility) and the text instruction (e.g., goal inference, conditional logic). Mention cases where reasoning \
appears strong or deficient. Use <ref> tags to support your analysis.

7. Manipulation Skills
Describe the physical performance of the policy: grasping, placing, stacking, inserting, pouring, drawer use, \
and recovery from errors. Use examples to show when skills succeed or fail.

8. Robustness to Scene Variations
Assess the policy's performance under different lighting, clutter levels, object positions, and camera views. \
Note any sensitivities to occlusion or distractors, etc.

9. Common Failure Modes
List frequently observed failures (e.g., freezing mid-task, grabbing wrong item, failing passive commands). \
Provide short descriptions and supporting citations.

Instructions:
- When referring to a session, always cite the full session ID (UUID format, e.g., \
16e5bbda-57c1-4e58-a24a-b39ee8142d41) exactly as provided. Do not shorten, truncate or modify it in any way.
- Always wrap session IDs inside <ref>...</ref> tags. Example: <ref>16e5bbda-57c1-4e58-a24a-b39ee8142d41</ref>
- Try to cite as many session IDs as possible to support your claims, but only if they are relevant to the \
point you're making.
- Avoid generalizing from a single episode unless there is clear evidence of a pattern.
- Keep the tone analytical and professional, emphasizing repeatable behaviors and insights.
- Do not invent session IDs. Only use session IDs present in the provided episode reports.
- There is no need to mention the specific number of episodes and wins/losses/ties in head-to-head evaluations \
in this report.

The individual episode reports are as follows:

{episode_reports}
"""

SUMMARY_PROMPT_TEMPLATE = """Given the following full evaluation report of a robot manipulation policy, generate a \
concise, high-quality summary that captures the main findings from sections 1 through 9.

Each bullet should summarize the corresponding section in a few sentence fragments, focusing on the most \
important points. Avoid excessive detail, ensure clarity and correctness. Stick to the facts presented in the \
full report.

Use the following format exactly:

- Policy Overview: <summary>

- Comparative Performance: <summary>

- Strengths: <summary>

- Weaknesses: <summary>

- Instruction Following: <summary>

- Reasoning: <summary>

- Manipulation Skills: <summary>

- Robustness to Scene Variations: <summary>

- Common Failure Modes: <summary>

Place a line break between each bullet point. Don't output anything before or after the bullet points.

Here is the full report to summarize:

{full_report}
"""


def render_categorize_prompt(instruction: str) -> str:
    return CATEGORIZE_PROMPT_TEMPLATE.format(instruction=instruction, categories=CATEGORY_LIST)


def render_episode_block(number: int, session_id: str, instruction: str, category: str,
                         scene: str, result_summary: str) -> str:
    return (f"{EPISODE_SEPARATOR.format(number=number)}\n"
            f"Session ID: {session_id}\n"
            f"Task: {instruction}\n"
            f"Task category: {category}\n"
            f"Scene and task analysis: {scene}\n"
            f"Head-to-head result: {result_summary}\n")


def render_full_report_prompt(policy_name: str, episode_blocks: list[str]) -> str:
    return FULL_REPORT_PROMPT_TEMPLATE.format(policy_name=policy_name, categories=CATEGORY_LIST,
                                              episode_reports="\n".join(episode_blocks))


def render_summary_prompt(full_report: str) -> str:
    return SUMMARY_PROMPT_TEMPLATE.format(full_report=full_report)
