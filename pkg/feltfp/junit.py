"""
Render check reports as a JUnit XML test suite, so CI servers can display
the outcome of ``feltfp check`` per check.
"""

import json

from lxml import etree, objectify

from feltfp.reports import FAIL, PASS_SAMPLED

JUNIT = objectify.ElementMaker(annotate=False)


def testcase(report, suite_name):
    """
    Create the <testcase> element of a report.

    Failed checks get a <failure> carrying the JSON witness, sampled passes
    a <system-out> note.
    """
    case = JUNIT.testcase(name=report.check_name, classname=suite_name)
    if report.verdict == FAIL:
        case.append(JUNIT.failure(json.dumps(report.witness, sort_keys=True),
                                  message=str(report), type=report.check_name))
    elif report.verdict == PASS_SAMPLED:
        case.append(JUNIT("system-out", "pass_sampled: {}".format(
            json.dumps(report.to_dict()["detail"], sort_keys=True))))
    return case


def render_junit(reports, suite_name="feltfp"):
    """
    Render reports as a JUnit XML document.

    Args:
        reports (list of CheckReport):
        suite_name (str): name of the <testsuite>, usually the space and map

    Returns:
        bytes: UTF-8 encoded XML with declaration
    """
    failures = sum(1 for r in reports if r.verdict == FAIL)
    suite = JUNIT.testsuite(*[testcase(r, suite_name) for r in reports],
                            name=suite_name, tests=str(len(reports)),
                            failures=str(failures), errors="0")
    objectify.deannotate(suite, cleanup_namespaces=True)
    return etree.tostring(suite, pretty_print=True, xml_declaration=True, encoding="UTF-8")
