"""Prompt templates for the three extraction stages.

Each stage asks a fixed chain of questions over the submitted code and
demands a JSON reply that strictly follows an inline example, which pins
the response schema the stage validator checks against.
"""

from __future__ import annotations

import json

ENDPOINTS_EXAMPLE = [
    {
        "endpoint_path": "/api/getUser",
        "http_method": "GET",
        "method_name": "getUser()",
    }
]

PARAMS_RESPONSES_EXAMPLE = [
    {
        "endpoint_path": "/api/getUser",
        "endpoint_method": "GET",
        "description": "An Endpoint to Get User List",
        "parameters": [
            {
                "name": "str_param",
                "type": "string",
                "require": "true",
                "position": "query",
                "description": "some string parameter",
            },
            {
                "name": "num_param",
                "type": "int",
                "require": "true",
                "position": "path",
                "description": "some number parameter",
            },
            {
                "name": "bool_param",
                "type": "boolean",
                "require": "true",
                "position": "query",
                "description": "some boolean parameter",
            },
        ],
        "response": {
            "status_code": 200,
            "return_schema": [
                {"userName": "u", "password": "p", "birthday": "1970-01-01"},
                {"userName": "u", "password": "p", "birthday": "1970-01-01"},
            ],
            "exception": "NotFoundException",
        },
    }
]

CONSTRAINTS_EXAMPLE = [
    {
        "name": "str_param",
        "type": "string",
        "require": "true",
        "position": "query",
        "description": "some string parameter",
        "max_length": "128",
        "min_length": "16",
        "enum": ["enum1", "enum2", "enum3"],
        "format": "yyyy-mm-dd hh24:mi:ss",
        "default_value": "hello world",
    },
    {
        "name": "num_param",
        "type": "int",
        "require": "true",
        "position": "path",
        "description": "some number parameter",
        "min": 2,
        "max": 16,
        "default_value": 0,
    },
    {
        "name": "bool_param",
        "type": "boolean",
        "require": "true",
        "position": "query",
        "description": "some boolean parameter",
        "default_value": True,
    },
]


def _example(value) -> str:
    return json.dumps(value, ensure_ascii=False)


def endpoints_prompt(endpoint_code_lines: str) -> str:
    return (
        f"Read the endpoint entry code (scoped from ## to ##): "
        f"##{endpoint_code_lines}##, and following these steps: "
        f"1.How many endpoints are included in the code? "
        f"2.For each endpoint, what is its HTTP_METHOD (e.g., GET, POST, ...)? "
        f"3.For each endpoint, what is its URL path? "
        f"4.For each endpoint, what is its method name? "
        f"At last, provide the result in JSON format, please strictly follow the example: "
        f"{_example(ENDPOINTS_EXAMPLE)}."
    )


def params_responses_prompt(endpoint_code_lines: str, endpoint_method_name: str) -> str:
    return (
        f"Please read the endpoint codes (scoped from ## to ##): "
        f"##{endpoint_code_lines}##, and following these steps:"
        f"For the specific endpoint method named: {endpoint_method_name}, how many parameters are there? "
        f"1.For each parameter, what is its name, and type (e.g., string, number, integer, object, array, boolean)? Is it required? "
        f"2.What is this parameter located in (e.g., query or path)? "
        f"3.What is this parameter represent for? "
        f"4.What is this endpoint's response? how many responses do this endpoint returned?"
        f" what is the return HTTP status code for each one?"
        f" If an exception occurs, what is the exception message?"
        f" If any data is returned, what is the specific schema of the data?"
        f"At last, provide the result in JSON format, please strictly follow the example: "
        f"{_example(PARAMS_RESPONSES_EXAMPLE)}."
    )


def constraints_prompt(
    endpoint_code_lines: str, endpoint_method_name: str, endpoint_parameter_name: str
) -> str:
    return (
        f"Please read the endpoint codes (scoped from ## to ##): "
        f"##{endpoint_code_lines}##, and following these steps:"
        f"For the specific parameter: {endpoint_parameter_name} in endpoint method named: {endpoint_method_name},"
        f"1.What is its type (e.g., string, number, integer, object, array, boolean)? Is it required? "
        f"2.For string type parameter, what is its minLength and maxLength? what is its default value?"
        f" If this string parameter is an enumeration, what is its enumeration?"
        f" If this string parameter is in date or pattern format, what is its date-time format or pattern?"
        f"3.For integer and number type parameter, what is its range? what is its default value? "
        f"4.For boolean type parameter, is it True or False? "
        f"5.For parameter in mapping, please read the endpoint codes and analyzed the above steps. "
        f"At last, provide the result in JSON format, please strictly follow the example: "
        f"{_example(CONSTRAINTS_EXAMPLE)}."
    )


def corrective_instruction(error: str) -> str:
    """Appended after a reply fails validation, before the retry."""
    return (
        f"The previous reply could not be used: {error}. "
        f"Please answer again with only valid JSON that strictly follows the example format."
    )


def bundle_code_lines(entry_text: str, related: dict[str, str]) -> str:
    """Join the entry file and its related files into one code blob.

    Related files are labeled with their project-relative path on a marker
    line; the marker avoids '#' runs because '##' delimits the code scope
    inside the prompts.
    """
    parts = [entry_text]
    for rel_path, text in related.items():
        parts.append(f"----- file: {rel_path} -----")
        parts.append(text)
    return "\n".join(parts)
